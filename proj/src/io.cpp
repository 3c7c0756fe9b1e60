#include "lmfg/io.hpp"

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace lmfg {

namespace fs = std::filesystem;

std::string fmt_double(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    // prefer the shortest representation that round-trips
    for (int prec = 1; prec < 17; ++prec) {
        char probe[32];
        std::snprintf(probe, sizeof(probe), "%.*g", prec, x);
        double back;
        std::sscanf(probe, "%lf", &back);
        if (back == x) return probe;
    }
    return buf;
}

std::uint64_t fnv1a64(const void* data, std::size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t fnv1a64_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::uint64_t h = 0xcbf29ce484222325ULL;
    char buf[65536];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        std::streamsize got = in.gcount();
        for (std::streamsize i = 0; i < got; ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 0x100000001b3ULL;
        }
    }
    return h;
}

namespace {

void put_u32le(std::ofstream& out, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                          static_cast<unsigned char>((v >> 8) & 0xff),
                          static_cast<unsigned char>((v >> 16) & 0xff),
                          static_cast<unsigned char>((v >> 24) & 0xff)};
    out.write(reinterpret_cast<char*>(b), 4);
}

std::uint32_t get_u32le(std::ifstream& in) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) |
           (static_cast<std::uint32_t>(b[3]) << 24);
}

void put_f64le(std::ofstream& out, double x) {
    std::uint64_t v;
    std::memcpy(&v, &x, 8);
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
    out.write(reinterpret_cast<char*>(b), 8);
}

double get_f64le(std::ifstream& in) {
    unsigned char b[8];
    in.read(reinterpret_cast<char*>(b), 8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    double x;
    std::memcpy(&x, &v, 8);
    return x;
}

} // namespace

void write_raster(const fs::path& path, const std::vector<int>& dims,
                  const std::vector<double>& data) {
    long n = 1;
    for (int d : dims) n *= d;
    if (static_cast<long>(data.size()) != n)
        throw std::invalid_argument("write_raster: shape mismatch");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out.write("LMFG", 4);
    char v = static_cast<char>(kRasterVersion);
    out.write(&v, 1);
    char nd = static_cast<char>(dims.size());
    out.write(&nd, 1);
    for (int d : dims) put_u32le(out, static_cast<std::uint32_t>(d));
    for (double x : data) put_f64le(out, x);
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

Raster read_raster(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, "LMFG", 4) != 0)
        throw std::runtime_error(path.string() + ": not an LMFG raster");
    char ver, nd;
    in.read(&ver, 1);
    in.read(&nd, 1);
    if (static_cast<std::uint8_t>(ver) != kRasterVersion)
        throw std::runtime_error(path.string() + ": unsupported raster version");
    if (nd < 1 || nd > 3) throw std::runtime_error(path.string() + ": bad dimension count");
    Raster r;
    long n = 1;
    for (int a = 0; a < nd; ++a) {
        r.dims.push_back(static_cast<int>(get_u32le(in)));
        n *= r.dims.back();
    }
    r.data.resize(n);
    for (long i = 0; i < n; ++i) r.data[i] = get_f64le(in);
    if (!in) throw std::runtime_error(path.string() + ": truncated raster");
    return r;
}

void write_text(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

void write_manifest(const fs::path& dir) {
    std::vector<std::string> files;
    for (const auto& e : fs::recursive_directory_iterator(dir)) {
        if (!e.is_regular_file()) continue;
        std::string rel = fs::relative(e.path(), dir).generic_string();
        if (rel == "manifest.csv" || rel.ends_with("/manifest.csv")) continue;
        files.push_back(rel);
    }
    std::sort(files.begin(), files.end());
    std::string out = "path,bytes,fnv1a64\n";
    for (const auto& rel : files) {
        fs::path p = dir / rel;
        char hex[17];
        std::snprintf(hex, sizeof(hex), "%016llx",
                      static_cast<unsigned long long>(fnv1a64_file(p)));
        out += rel + "," + std::to_string(fs::file_size(p)) + "," + hex + "\n";
    }
    write_text(dir / "manifest.csv", out);
}

} // namespace lmfg
