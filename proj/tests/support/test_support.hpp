#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <string>
#include <unistd.h>

#include "gifs/mesh.hpp"
#include "gifs/sampling.hpp"

namespace gifs::testing {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("gifs_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline std::string read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_bytes(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

inline Vec3 random_point(Rng& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  const double x = u(rng);
  const double y = u(rng);
  const double z = u(rng);
  return {x, y, z};
}

/// Random triangle soup inside [lo, hi]^3.
inline TriangleMesh random_soup(std::size_t faces, RngSeed seed, double lo = -0.5, double hi = 0.5) {
  Rng rng = make_rng(seed);
  TriangleMesh mesh;
  for (std::size_t f = 0; f < faces; ++f) {
    const auto base = static_cast<std::uint32_t>(mesh.vertices.size());
    const Vec3 c = random_point(rng, lo, hi);
    for (int k = 0; k < 3; ++k) mesh.vertices.push_back(c + random_point(rng, -0.1, 0.1));
    mesh.faces.push_back({base, base + 1, base + 2});
  }
  return mesh;
}

}  // namespace gifs::testing
