// File formats shared by the experiment runner: deterministic decimal
// formatting, the LMFG raster snapshot format (magic "LMFG", version
// byte, dimension count, u32-LE axis sizes, row-major f64-LE payload),
// and the content-checksum manifest.

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace lmfg {

// Shortest round-trip decimal representation; identical output on every
// run regardless of locale.
std::string fmt_double(double x);

std::uint64_t fnv1a64(const void* data, std::size_t len);
std::uint64_t fnv1a64_file(const std::filesystem::path& path);

constexpr std::uint8_t kRasterVersion = 1;

void write_raster(const std::filesystem::path& path, const std::vector<int>& dims,
                  const std::vector<double>& data);

struct Raster {
    std::vector<int> dims;
    std::vector<double> data;
};

Raster read_raster(const std::filesystem::path& path);

void write_text(const std::filesystem::path& path, const std::string& content);

// Scans `dir` recursively and writes manifest.csv (relative path, size,
// fnv1a64 hex), sorted by path. The manifest itself is excluded.
void write_manifest(const std::filesystem::path& dir);

} // namespace lmfg
