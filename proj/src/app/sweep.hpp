#pragma once

#include "config.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace optomech::sweep {

inline constexpr const char* version = "0.1.0";

enum class Format { Csv, Json };

struct RunOptions {
  unsigned threads = 1;
  std::optional<double> tolerance;  // overrides the config value
  std::uint64_t seed = 0;           // recorded in the provenance sidecar
  Format format = Format::Csv;
  std::string output_dir = ".";
  bool svg = false;
};

struct Cell {
  enum class Kind { Null, Number, Bool, Text };
  Kind kind = Kind::Null;
  double number = 0.0;
  bool flag = false;
  std::string text;

  static Cell null() { return {}; }
  static Cell of(double v);  // NaN and infinities become null
  static Cell of(bool v) { return {Kind::Bool, 0.0, v, {}}; }
  static Cell of(std::string v) { return {Kind::Text, 0.0, false, std::move(v)}; }
};

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;  // grid order, first axis slowest
  std::size_t unstable = 0;
  std::size_t failed = 0;  // points whose evaluation raised an error
};

// Evaluates every grid point. Independent of the thread count.
Table evaluate(const config::SweepSpec& spec, const RunOptions& options);

std::string to_csv(const Table& table);
std::string to_json(const Table& table);

// Provenance sidecar; `output_file` is the data file name.
std::string provenance(const config::SweepSpec& spec, const RunOptions& options, const Table& table,
                       const std::string& output_file);

// Line plot for one axis, heatmap of the first observable for two axes.
// Returns an empty string when the grid has neither shape.
std::string render_svg(const config::SweepSpec& spec, const Table& table);

struct RunSummary {
  std::string data_path;
  std::string provenance_path;
  std::string svg_path;  // empty unless rendered
  std::size_t points = 0;
  std::size_t unstable = 0;
  std::size_t failed = 0;
};

// Evaluates the sweep and writes <name>.csv|json, <name>.provenance.json and
// optionally <name>.svg into options.output_dir.
RunSummary run(const config::SweepSpec& spec, const RunOptions& options);

}  // namespace optomech::sweep
