#include "fraclab/snapshot.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "fraclab/errors.hpp"

namespace fraclab {

namespace {

constexpr char kMagic[8] = {'W', 'S', 'P', 'F', 'I', 'E', 'L', 'D'};
constexpr std::uint32_t kVersion = 1;

template <class T>
void put(std::string& out, T value) {
    if constexpr (std::endian::native == std::endian::big) {
        auto bytes = std::bit_cast<std::array<unsigned char, sizeof(T)>>(value);
        std::reverse(bytes.begin(), bytes.end());
        value = std::bit_cast<T>(bytes);
    }
    char buf[sizeof(T)];
    std::memcpy(buf, &value, sizeof(T));
    out.append(buf, sizeof(T));
}

class Reader {
public:
    explicit Reader(const std::string& bytes) : b_(bytes) {}

    template <class T>
    T get() {
        if (pos_ + sizeof(T) > b_.size()) throw Error("snapshot truncated");
        T value;
        std::memcpy(&value, b_.data() + pos_, sizeof(T));
        pos_ += sizeof(T);
        if constexpr (std::endian::native == std::endian::big) {
            auto bytes = std::bit_cast<std::array<unsigned char, sizeof(T)>>(value);
            std::reverse(bytes.begin(), bytes.end());
            value = std::bit_cast<T>(bytes);
        }
        return value;
    }
    void raw(void* dst, std::size_t n) {
        if (pos_ + n > b_.size()) throw Error("snapshot truncated");
        std::memcpy(dst, b_.data() + pos_, n);
        pos_ += n;
    }
    bool done() const { return pos_ == b_.size(); }

private:
    const std::string& b_;
    std::size_t pos_ = 0;
};

}  // namespace

std::string encode_snapshot(const FieldMap& field) {
    const Grid& g = field.grid();
    std::string out(kMagic, sizeof(kMagic));
    put<std::uint32_t>(out, kVersion);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(g.dim()));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(field.components()));
    put<std::uint32_t>(out, 0);
    for (int d = 0; d < 3; ++d) put<std::uint64_t>(out, g.extents()[d]);
    put<double>(out, g.h());
    for (int d = 0; d < 3; ++d) put<double>(out, g.interior_box().lo[d]);
    put<std::uint64_t>(out, g.collar_layers());
    put<std::uint64_t>(out, g.size());
    out.reserve(out.size() + field.values().size() * 8 + g.size());
    for (double v : field.values()) put<double>(out, v);
    for (std::uint8_t f : field.frozen_mask()) put<std::uint8_t>(out, f);
    return out;
}

FieldMap decode_snapshot(const std::string& bytes) {
    Reader r(bytes);
    char magic[8];
    r.raw(magic, 8);
    if (std::memcmp(magic, kMagic, 8) != 0) throw Error("not a field snapshot (bad magic)");
    const auto version = r.get<std::uint32_t>();
    if (version != kVersion) throw Error("unsupported snapshot version " + std::to_string(version));
    const auto n = static_cast<int>(r.get<std::uint32_t>());
    const auto N = static_cast<int>(r.get<std::uint32_t>());
    r.get<std::uint32_t>();
    MultiIndex ext{};
    for (int d = 0; d < 3; ++d) ext[d] = r.get<std::uint64_t>();
    const double h = r.get<double>();
    Point lo{};
    for (int d = 0; d < 3; ++d) lo[d] = r.get<double>();
    const auto layers = r.get<std::uint64_t>();
    const auto M = r.get<std::uint64_t>();
    if (n < 1 || n > 3 || N < 1 || !(h > 0.0)) throw Error("corrupt snapshot header");

    Box box;
    box.dim = n;
    box.lo = lo;
    box.hi = lo;
    for (int d = 0; d < n; ++d) {
        if (ext[d] <= 2 * layers) throw Error("corrupt snapshot header (extents)");
        box.hi[d] = lo[d] + static_cast<double>(ext[d] - 2 * layers) * h;
    }
    GridOptions opts;
    opts.max_cells = M;
    const Grid grid = build_grid(FractionalParams(0.5, 2.0, n, std::max(N, 2)), box, h,
                                 static_cast<double>(layers) * h, opts);
    if (grid.size() != M || grid.extents() != ext) throw Error("snapshot header is inconsistent with its cell count");

    FieldMap f(grid, N);
    for (double& v : f.values()) v = r.get<double>();
    for (std::size_t i = 0; i < M; ++i) f.set_frozen(i, r.get<std::uint8_t>() != 0);
    if (!r.done()) throw Error("trailing bytes after snapshot payload");
    return f;
}

void write_snapshot(const std::string& path, const FieldMap& field) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw Error("cannot open '" + path + "' for writing");
    const std::string bytes = encode_snapshot(field);
    os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!os) throw Error("failed writing '" + path + "'");
}

FieldMap read_snapshot(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error("cannot open snapshot '" + path + "'");
    std::ostringstream ss;
    ss << is.rdbuf();
    return decode_snapshot(ss.str());
}

}  // namespace fraclab
