#include "lcns/grid.hpp"

#include <string>

#include "lcns/error.hpp"

namespace lcns {

Grid Grid::make(int dim, std::array<int, 3> cells, std::array<double, 3> lengths) {
    if (dim < 1 || dim > 3) raise(ErrorKind::InvalidArgument, "grid dimension must be 1, 2 or 3");
    Grid g;
    g.dim = dim;
    for (int a = 0; a < 3; ++a) {
        if (a < dim) {
            if (cells[a] < 4) raise(ErrorKind::InvalidArgument, "grid needs at least 4 cells per axis");
            if (!(lengths[a] > 0.0)) raise(ErrorKind::InvalidArgument, "grid length must be positive");
            g.n[a] = cells[a];
            g.h[a] = lengths[a] / cells[a];
        } else {
            g.n[a] = 1;
            g.h[a] = 1.0;
        }
    }
    return g;
}

Grid Grid::unit(int dim, int cells) { return make(dim, {cells, cells, cells}, {1.0, 1.0, 1.0}); }

std::size_t Grid::cells() const {
    std::size_t c = 1;
    for (int a = 0; a < dim; ++a) c *= static_cast<std::size_t>(n[a]);
    return c;
}

double Grid::cell_volume() const {
    double v = 1.0;
    for (int a = 0; a < dim; ++a) v *= h[a];
    return v;
}

double Grid::volume() const { return cell_volume() * static_cast<double>(cells()); }

std::size_t Grid::stride(int axis) const {
    std::size_t s = 1;
    for (int a = axis + 1; a < dim; ++a) s *= static_cast<std::size_t>(n[a]);
    return s;
}

std::array<int, 3> Grid::coords(std::size_t idx) const {
    std::array<int, 3> c{0, 0, 0};
    for (int a = dim - 1; a >= 0; --a) {
        c[a] = static_cast<int>(idx % static_cast<std::size_t>(n[a]));
        idx /= static_cast<std::size_t>(n[a]);
    }
    return c;
}

std::size_t Grid::index(int i0, int i1, int i2) const {
    const int c[3] = {i0, i1, i2};
    std::size_t idx = 0;
    for (int a = 0; a < dim; ++a) idx = idx * static_cast<std::size_t>(n[a]) + static_cast<std::size_t>(c[a]);
    return idx;
}

Grid Grid::refined() const {
    return make(dim, {2 * n[0], 2 * n[1], 2 * n[2]}, {length(0), length(1), length(2)});
}

bool Grid::operator==(const Grid& o) const {
    if (dim != o.dim) return false;
    for (int a = 0; a < dim; ++a)
        if (n[a] != o.n[a] || h[a] != o.h[a]) return false;
    return true;
}

void require_same_grid(const Grid& a, const Grid& b, const char* where) {
    if (a != b) raise(ErrorKind::GridMismatch, std::string(where) + ": operands live on different grids");
}

}  // namespace lcns
