#pragma once

#include "model.hpp"

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>

namespace fixtures {

// omega_m / 2pi = 10 MHz, Q = 1e5, L = 1 mm, lambda = 810 nm, T = 0.4 K.
inline optomech::model::SystemParams base() {
  optomech::model::SystemParams p;
  p.omega_m = 2.0 * 3.14159265358979323846 * 10e6;
  p.quality = 1e5;
  p.length = 1e-3;
  p.wavelength = 810e-9;
  p.temperature = 0.4;
  p.detuning = p.omega_m;
  return p;
}

inline optomech::model::SystemParams set_a() {
  auto p = base();
  p.mass = 10e-12;
  p.finesse = 1.67e4;
  p.power = 50e-3;
  return p;
}

inline optomech::model::SystemParams set_b() {
  auto p = base();
  p.mass = 50e-12;
  p.finesse = 2e4;
  p.power = 30e-3;
  return p;
}

inline optomech::Rates set_b_rates() { return optomech::model::derive_constants(set_b()).rates(); }

}  // namespace fixtures

namespace fixtures {

// Fresh empty directory under the system temp dir, removed on destruction.
class ScratchDir {
 public:
  explicit ScratchDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("optomech_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~ScratchDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  ScratchDir(const ScratchDir&) = delete;
  ScratchDir& operator=(const ScratchDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path write(const std::string& name, const std::string& text) const {
    const auto p = path_ / name;
    std::ofstream(p) << text;
    return p;
  }

 private:
  std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline const char* set_b_yaml =
    "omega_m: 10 MHz\nquality: 1e5\nmass: 50 ng\nlength: 1 mm\nwavelength: 810 nm\nfinesse: 2e4\n"
    "power: 30 mW\ndetuning: 1 omega_m\ntemperature: 0.4 K\n";

}  // namespace fixtures
