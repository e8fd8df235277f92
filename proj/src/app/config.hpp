#pragma once

#include "model.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace optomech::config {

// What a quantity measures, which fixes the accepted unit suffixes.
enum class Dimension {
  Frequency,    // rad/s | Hz | kHz | MHz | GHz (cyclic, times 2 pi) | omega_m
  Mass,         // kg | g | mg | ug | ng | pg
  Length,       // m | cm | mm | um | nm
  Power,        // W | mW | uW
  Temperature,  // K | mK | uK
  Plain,        // no unit allowed
  Epsilon,      // omega_m tau: plain or "pi" (multiples of pi)
};

// Parses "<number> [unit]". Dimensional quantities without a unit are
// rejected. Frequencies come back in rad/s, or in units of omega_m when
// `normalized` is set (then omega_m_si converts the SI spellings).
double parse_quantity(const std::string& text, Dimension dim, double omega_m_si = 0.0, bool normalized = false,
                      int line = 0, const std::string& field = {});

model::SystemParams load_system(const std::string& path);
model::SystemParams parse_system(const std::string& text, const std::string& origin = "<string>");

enum class Param {
  Detuning,
  BareDetuning,
  Power,
  Finesse,
  Kappa,
  Temperature,
  Mass,
  Quality,
  Epsilon,
  Center,   // first filter centre
  Center2,  // second filter centre
  Omega,    // spectrum frequency
};

const char* param_name(Param p);

enum class Observable { Intracavity, Cooling, Spectrum, MechOutput, TwoMode, Tripartite };

const char* observable_name(Observable o);

struct Axis {
  Param param;
  // SI for physical parameters; units of omega_m for Center, Center2, Omega
  // and Epsilon.
  std::vector<double> values;
};

struct SweepSpec {
  std::string name;
  model::SystemParams system;
  std::vector<Axis> axes;  // first axis varies slowest
  std::vector<Observable> observables;
  double epsilon = 10.0;                   // omega_m tau
  std::vector<double> centers{-1.0, 1.0};  // units of omega_m
  bool markovian = true;
  double tolerance = 1e-8;
  std::size_t max_points = 1'000'000;
  std::string source_path;
  std::string source_text;

  std::size_t grid_size() const;
};

SweepSpec load_sweep(const std::string& path);
SweepSpec parse_sweep(const std::string& text, const std::string& origin = "<string>");

}  // namespace optomech::config
