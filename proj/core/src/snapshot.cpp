#include "lcns/snapshot.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>

#include "lcns/error.hpp"

namespace lcns {

namespace {

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t x) {
    for (int b = 0; b < 4; ++b) out.push_back(static_cast<std::uint8_t>((x >> (8 * b)) & 0xFFu));
}

void put_f64(std::vector<std::uint8_t>& out, double d) {
    const auto x = std::bit_cast<std::uint64_t>(d);
    for (int b = 0; b < 8; ++b) out.push_back(static_cast<std::uint8_t>((x >> (8 * b)) & 0xFFu));
}

class Reader {
public:
    explicit Reader(const std::vector<std::uint8_t>& b) : b_(b) {}
    std::uint32_t u32() {
        need(4);
        std::uint32_t x = 0;
        for (int k = 0; k < 4; ++k) x |= static_cast<std::uint32_t>(b_[pos_ + k]) << (8 * k);
        pos_ += 4;
        return x;
    }
    double f64() {
        need(8);
        std::uint64_t x = 0;
        for (int k = 0; k < 8; ++k) x |= static_cast<std::uint64_t>(b_[pos_ + k]) << (8 * k);
        pos_ += 8;
        return std::bit_cast<double>(x);
    }
    void magic() {
        need(4);
        if (std::memcmp(b_.data() + pos_, "LCNS", 4) != 0) raise(ErrorKind::ParseError, "snapshot magic mismatch");
        pos_ += 4;
    }
    bool done() const { return pos_ == b_.size(); }

private:
    void need(std::size_t k) {
        if (pos_ + k > b_.size()) raise(ErrorKind::ParseError, "snapshot truncated");
    }
    const std::vector<std::uint8_t>& b_;
    std::size_t pos_ = 0;
};

std::vector<std::uint8_t> encode(const Grid& g, int comps, double time, const double* data) {
    std::vector<std::uint8_t> out;
    const std::size_t n = g.cells();
    out.reserve(32 + 12 * g.dim + 8 * n * comps);
    out.insert(out.end(), {'L', 'C', 'N', 'S'});
    put_u32(out, kSnapshotVersion);
    put_u32(out, static_cast<std::uint32_t>(g.dim));
    put_u32(out, static_cast<std::uint32_t>(comps));
    for (int a = 0; a < g.dim; ++a) put_u32(out, static_cast<std::uint32_t>(g.n[a]));
    for (int a = 0; a < g.dim; ++a) put_f64(out, g.h[a]);
    put_f64(out, time);
    for (std::size_t i = 0; i < n; ++i)
        for (int c = 0; c < comps; ++c) put_f64(out, data[c * n + i]);
    return out;
}

}  // namespace

ScalarField Snapshot::scalar() const {
    if (components != 1) raise(ErrorKind::TypeMismatch, "snapshot does not hold a scalar field");
    return ScalarField(grid, values);
}

VectorField Snapshot::vector(bool no_slip) const {
    if (components != grid.dim) raise(ErrorKind::TypeMismatch, "snapshot does not hold a vector field");
    VectorField v(grid, no_slip);
    const std::size_t n = grid.cells();
    for (std::size_t i = 0; i < n; ++i)
        for (int c = 0; c < components; ++c) v.at(c, i) = values[i * components + c];
    return v;
}

std::vector<std::uint8_t> encode_snapshot(const ScalarField& s, double time) {
    return encode(s.grid(), 1, time, s.data());
}

std::vector<std::uint8_t> encode_snapshot(const VectorField& v, double time) {
    return encode(v.grid(), v.dim(), time, v.data());
}

Snapshot decode_snapshot(const std::vector<std::uint8_t>& bytes) {
    Reader r(bytes);
    r.magic();
    const std::uint32_t version = r.u32();
    if (version != kSnapshotVersion) raise(ErrorKind::ParseError, "unsupported snapshot version");
    const int dim = static_cast<int>(r.u32());
    const int comps = static_cast<int>(r.u32());
    if (dim < 1 || dim > 3 || (comps != 1 && comps != dim)) raise(ErrorKind::ParseError, "bad snapshot header");
    std::array<int, 3> cells{1, 1, 1};
    std::array<double, 3> h{1, 1, 1};
    for (int a = 0; a < dim; ++a) cells[a] = static_cast<int>(r.u32());
    for (int a = 0; a < dim; ++a) h[a] = r.f64();
    Snapshot s;
    s.grid = Grid::make(dim, cells, {h[0] * cells[0], h[1] * cells[1], h[2] * cells[2]});
    for (int a = 0; a < dim; ++a) s.grid.h[a] = h[a];
    s.components = comps;
    s.time = r.f64();
    s.values.resize(s.grid.cells() * comps);
    for (double& x : s.values) x = r.f64();
    if (!r.done()) raise(ErrorKind::ParseError, "trailing bytes after snapshot payload");
    return s;
}

void write_snapshot(const std::string& path, const ScalarField& s, double time) {
    write_file_atomic(path, encode_snapshot(s, time));
}

void write_snapshot(const std::string& path, const VectorField& v, double time) {
    write_file_atomic(path, encode_snapshot(v, time));
}

Snapshot read_snapshot(const std::string& path) { return decode_snapshot(read_file_bytes(path)); }

void write_file_atomic(const std::string& path, const std::vector<std::uint8_t>& bytes) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) raise(ErrorKind::IoError, "cannot open " + tmp.string());
        f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
        if (!f) raise(ErrorKind::IoError, "write failed for " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp);
        raise(ErrorKind::IoError, "rename failed for " + path + ": " + ec.message());
    }
}

void write_file_atomic(const std::string& path, const std::string& text) {
    write_file_atomic(path, std::vector<std::uint8_t>(text.begin(), text.end()));
}

std::vector<std::uint8_t> read_file_bytes(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) raise(ErrorKind::MissingFile, "cannot read " + path);
    return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>());
}

}  // namespace lcns
