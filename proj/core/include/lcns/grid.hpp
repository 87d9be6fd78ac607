#pragma once

#include <array>
#include <cstddef>

namespace lcns {

/// Uniform cell-centred grid on the box [0, n_a * h_a] per axis.
/// Values live at cell centres (i + 1/2) h; boundary conditions enter
/// through ghost cells mirrored across each wall.
struct Grid {
    int dim = 1;
    std::array<int, 3> n{1, 1, 1};
    std::array<double, 3> h{1.0, 1.0, 1.0};

    /// Validating constructor: dim in {1,2,3}, n >= 4, h > 0 on active axes.
    static Grid make(int dim, std::array<int, 3> cells, std::array<double, 3> lengths);
    /// Unit box with the same cell count on every axis.
    static Grid unit(int dim, int cells);

    std::size_t cells() const;
    double cell_volume() const;
    double volume() const;
    double length(int axis) const { return n[axis] * h[axis]; }
    double center(int axis, int i) const { return (i + 0.5) * h[axis]; }
    /// Distance in the flat array between neighbours along `axis` (last axis fastest).
    std::size_t stride(int axis) const;
    /// Multi-index of a flat cell index.
    std::array<int, 3> coords(std::size_t idx) const;
    std::size_t index(int i0, int i1 = 0, int i2 = 0) const;
    /// Same box, twice the cells per axis.
    Grid refined() const;

    bool operator==(const Grid& o) const;
    bool operator!=(const Grid& o) const { return !(*this == o); }
};

/// Throws GridMismatch unless the two grids are identical.
void require_same_grid(const Grid& a, const Grid& b, const char* where);

}  // namespace lcns
