#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lcns/field.hpp"

namespace lcns {

inline constexpr std::uint32_t kSnapshotVersion = 1;

/// Decoded snapshot. `values` is cell-major (row-major cells, last axis
/// fastest) with the components of one cell adjacent.
struct Snapshot {
    Grid grid;
    int components = 1;
    double time = 0.0;
    std::vector<double> values;

    ScalarField scalar() const;
    VectorField vector(bool no_slip = false) const;
};

/// Little-endian byte image; layout documented in docs/snapshot-format.md.
std::vector<std::uint8_t> encode_snapshot(const ScalarField& s, double time);
std::vector<std::uint8_t> encode_snapshot(const VectorField& v, double time);
Snapshot decode_snapshot(const std::vector<std::uint8_t>& bytes);

void write_snapshot(const std::string& path, const ScalarField& s, double time);
void write_snapshot(const std::string& path, const VectorField& v, double time);
Snapshot read_snapshot(const std::string& path);

/// Writes to a sibling temporary then renames over `path`.
void write_file_atomic(const std::string& path, const std::vector<std::uint8_t>& bytes);
void write_file_atomic(const std::string& path, const std::string& text);
std::vector<std::uint8_t> read_file_bytes(const std::string& path);

}  // namespace lcns
