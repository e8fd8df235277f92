#include "doctest.h"
#include "fixtures.hpp"

#include "config.hpp"
#include "sweep.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

using namespace optomech;

namespace {

config::SweepSpec small_sweep() {
  std::string sys, line;
  std::istringstream in(fixtures::set_b_yaml);
  while (std::getline(in, line)) sys += "  " + line + "\n";
  return config::parse_sweep("name: small\nsystem:\n" + sys +
                             "axes:\n"
                             "  - {param: detuning, scale: values, values: [-1 omega_m, 0.5 omega_m, 1 omega_m]}\n"
                             "  - {param: power, scale: values, values: [10 mW, 30 mW]}\n"
                             "epsilon: 2 pi\n"
                             "observables: [intracavity, cooling, mech_output, tripartite]\n");
}

std::size_t column(const sweep::Table& t, const std::string& name) {
  const auto it = std::find(t.columns.begin(), t.columns.end(), name);
  REQUIRE(it != t.columns.end());
  return static_cast<std::size_t>(it - t.columns.begin());
}

}  // namespace

TEST_CASE("table layout and grid order") {
  const auto spec = small_sweep();
  const auto t = sweep::evaluate(spec, {});
  REQUIRE(t.rows.size() == 6);
  CHECK(t.columns[0] == "detuning_rad_s");
  CHECK(t.columns[1] == "detuning_norm");
  const auto power = column(t, "power_W"), det = column(t, "detuning_norm");
  CHECK(t.rows[0][power].number == doctest::Approx(0.01));
  CHECK(t.rows[1][power].number == doctest::Approx(0.03));
  CHECK(t.rows[1][det].number == doctest::Approx(-1.0));
  CHECK(t.rows[2][0].number == doctest::Approx(0.5 * spec.system.omega_m));
  for (const char* c : {"kappa_norm", "coupling_norm", "n_bar", "stable", "status", "en_intracavity", "n_eff",
                        "a_plus", "a_minus", "gamma_net", "n_eff_pert", "en_mech_output", "pt_mechanics",
                        "pt_stokes", "pt_anti_stokes", "fully_inseparable"})
    column(t, c);
  CHECK(t.failed == 0);
}

TEST_CASE("unstable points keep their parameters and get null observables") {
  const auto t = sweep::evaluate(small_sweep(), {});
  const auto stable = column(t, "stable"), status = column(t, "status"), en = column(t, "en_intracavity"),
             pt = column(t, "pt_stokes"), kappa = column(t, "kappa_norm");
  std::size_t unstable = 0;
  for (const auto& row : t.rows) {
    CHECK(row[kappa].kind == sweep::Cell::Kind::Number);
    if (row[stable].kind == sweep::Cell::Kind::Bool && !row[stable].flag) {
      ++unstable;
      CHECK(row[status].text == "unstable");
      CHECK(row[en].kind == sweep::Cell::Kind::Null);
      CHECK(row[pt].kind == sweep::Cell::Kind::Null);
    } else {
      CHECK(row[status].text == "ok");
      CHECK(row[en].kind == sweep::Cell::Kind::Number);
    }
  }
  CHECK(unstable == t.unstable);
  CHECK(unstable >= 1);
  CHECK(unstable < t.rows.size());
  const auto csv = sweep::to_csv(t);
  CHECK(csv.find(",,") != std::string::npos);
  const auto j = nlohmann::json::parse(sweep::to_json(t));
  bool saw_null = false;
  for (const auto& row : j) saw_null = saw_null || row["en_intracavity"].is_null();
  CHECK(saw_null);
}

TEST_CASE("output is byte-identical across reruns and thread counts") {
  const auto spec = small_sweep();
  sweep::RunOptions one, three;
  three.threads = 3;
  const auto a = sweep::to_csv(sweep::evaluate(spec, one));
  CHECK(a == sweep::to_csv(sweep::evaluate(spec, one)));
  CHECK(a == sweep::to_csv(sweep::evaluate(spec, three)));
  CHECK(sweep::to_json(sweep::evaluate(spec, one)) == sweep::to_json(sweep::evaluate(spec, three)));
}

TEST_CASE("run writes data, provenance and svg") {
  const fixtures::ScratchDir dir("sweep");
  auto spec = small_sweep();
  sweep::RunOptions opt;
  opt.output_dir = dir.path().string();
  opt.seed = 77;
  opt.svg = true;
  opt.format = sweep::Format::Json;
  const auto s = sweep::run(spec, opt);
  CHECK(s.points == 6);
  CHECK(std::filesystem::path(s.data_path).filename() == "small.json");
  CHECK(std::filesystem::path(s.provenance_path).filename() == "small.provenance.json");
  CHECK(fixtures::slurp(s.svg_path).rfind("<svg", 0) == 0);
  const auto data = fixtures::slurp(s.data_path);

  const auto prov = nlohmann::json::parse(fixtures::slurp(s.provenance_path));
  for (const char* key : {"name", "config_text", "seed", "threads", "tolerance", "conventions", "versions", "grid",
                          "columns", "summary", "created_utc"})
    CHECK_MESSAGE(prov.contains(key), key);
  CHECK(prov["seed"] == 77);
  CHECK(prov["grid"]["points"] == 6);
  CHECK(prov["summary"]["unstable"] == s.unstable);

  opt.threads = 2;
  sweep::run(spec, opt);
  CHECK(fixtures::slurp(s.data_path) == data);
}

TEST_CASE("cells") {
  CHECK(sweep::Cell::of(std::nan("")).kind == sweep::Cell::Kind::Null);
  CHECK(sweep::Cell::of(HUGE_VAL).kind == sweep::Cell::Kind::Null);
  CHECK(sweep::Cell::of(1.5).kind == sweep::Cell::Kind::Number);
}
