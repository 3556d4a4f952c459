#include "forager/neural/io.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>

namespace forager::neural {

namespace {

constexpr char kMagic[8] = {'F', 'R', 'G', 'P', 'A', 'R', 'A', 'M'};
constexpr std::uint32_t kVersion = 1;

void write_u32(std::ostream& os, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                          static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
    os.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t read_u32(std::istream& is) {
    unsigned char b[4];
    is.read(reinterpret_cast<char*>(b), 4);
    return static_cast<std::uint32_t>(b[0]) | static_cast<std::uint32_t>(b[1]) << 8 |
           static_cast<std::uint32_t>(b[2]) << 16 | static_cast<std::uint32_t>(b[3]) << 24;
}

void write_f64s(std::ostream& os, const Vec& v) {
    static_assert(sizeof(double) == 8);
    os.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size() * 8));
}

void read_f64s(std::istream& is, Vec& v) {
    is.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(v.size() * 8));
}

} // namespace

void save_params(const Params& params, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("save_params: cannot open " + path);
    os.write(kMagic, 8);
    write_u32(os, kVersion);
    write_u32(os, static_cast<std::uint32_t>(params.layers.size()));
    for (const Layer& l : params.layers) {
        write_u32(os, static_cast<std::uint32_t>(l.out));
        write_u32(os, static_cast<std::uint32_t>(l.in));
        write_f64s(os, l.w);
        write_f64s(os, l.b);
    }
    if (!os) throw std::runtime_error("save_params: write failed for " + path);
}

Params load_params(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("load_params: cannot open " + path);
    char magic[8];
    is.read(magic, 8);
    if (!is || std::memcmp(magic, kMagic, 8) != 0)
        throw std::runtime_error("load_params: bad magic in " + path);
    const std::uint32_t version = read_u32(is);
    if (version != kVersion)
        throw std::runtime_error("load_params: unsupported version " + std::to_string(version));
    const std::uint32_t n_layers = read_u32(is);
    Params p;
    for (std::uint32_t i = 0; i < n_layers; ++i) {
        Layer l;
        l.out = static_cast<int>(read_u32(is));
        l.in = static_cast<int>(read_u32(is));
        if (!is || l.out <= 0 || l.in <= 0 || l.out > (1 << 24) || l.in > (1 << 24))
            throw std::runtime_error("load_params: corrupt layer header in " + path);
        l.w.resize(static_cast<std::size_t>(l.out) * l.in);
        l.b.resize(l.out);
        read_f64s(is, l.w);
        read_f64s(is, l.b);
        p.layers.push_back(std::move(l));
    }
    if (!is) throw std::runtime_error("load_params: truncated file " + path);
    return p;
}

} // namespace forager::neural
