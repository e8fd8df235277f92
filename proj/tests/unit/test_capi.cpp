#include "doctest.h"
#include "fixtures.hpp"

#include "optomech/optomech.h"

#include <cmath>
#include <cstring>
#include <limits>
#include <numbers>
#include <string>

TEST_CASE("C API: system lifecycle and derived values") {
  om_system* sys = nullptr;
  REQUIRE(om_system_parse(fixtures::set_b_yaml, &sys) == OM_OK);
  om_derived d;
  REQUIRE(om_system_derived(sys, &d) == OM_OK);
  CHECK(d.omega_m_si == doctest::Approx(2 * std::numbers::pi * 1e7));
  CHECK(d.rates.kappa == doctest::Approx(0.7495).epsilon(1e-3));
  om_stability st;
  REQUIRE(om_system_stability(sys, &st) == OM_OK);
  CHECK(st.stable == 1);

  om_cm* cm = nullptr;
  REQUIRE(om_steady_cm(sys, OM_CM_LYAPUNOV, 1e-8, &cm) == OM_OK);
  CHECK(om_cm_dim(cm) == 4);
  CHECK(std::string(om_cm_label(cm, 1)) == "cavity");
  CHECK(om_cm_label(cm, 2) == nullptr);
  double v01 = 0.0, v10 = 0.0, buf[16];
  REQUIRE(om_cm_get(cm, 0, 1, &v01) == OM_OK);
  REQUIRE(om_cm_get(cm, 1, 0, &v10) == OM_OK);
  CHECK(v01 == v10);
  REQUIRE(om_cm_copy(cm, buf, 16) == OM_OK);
  CHECK(buf[1] == v01);
  double en = 0.0;
  REQUIRE(om_log_negativity(cm, 0, 1, &en) == OM_OK);
  CHECK(en == doctest::Approx(0.060558).epsilon(1e-4));
  om_cm_free(cm);
  om_system_free(sys);
}

TEST_CASE("C API: errors set a status and a message") {
  om_system* sys = nullptr;
  CHECK(om_system_parse("omega_m: 10 MHz\nmass: 3\n", &sys) == OM_ERR_CONFIG);
  CHECK(std::strlen(om_last_error()) > 0);
  CHECK(sys == nullptr);
  CHECK(om_system_parse(nullptr, &sys) == OM_ERR_INVALID_ARGUMENT);
  CHECK(std::string(om_status_name(OM_ERR_UNSTABLE)) == "unstable");
  CHECK(om_system_load("/nonexistent/sys.yaml", &sys) != OM_OK);

  const om_rates bad{-1.0, 1e-5, 0.1, 1.0, 0.0, 1.0};
  CHECK(om_system_from_rates(&bad, &sys) == OM_ERR_INVALID_ARGUMENT);

  const om_rates blue{0.5, 1e-5, 2.0, -1.0, 0.0, std::numeric_limits<double>::infinity()};
  REQUIRE(om_system_from_rates(&blue, &sys) == OM_OK);
  om_cm* cm = nullptr;
  CHECK(om_steady_cm(sys, OM_CM_LYAPUNOV, 1e-8, &cm) == OM_ERR_UNSTABLE);
  CHECK(cm == nullptr);
  om_system_free(sys);

  const om_rates ok{0.5, 1e-2, 0.1, 1.0, 0.0, 1.0};
  REQUIRE(om_system_from_rates(&ok, &sys) == OM_OK);
  REQUIRE(om_steady_cm(sys, OM_CM_LYAPUNOV, 1e-8, &cm) == OM_OK);
  double v = 0.0;
  CHECK(om_cm_get(cm, 4, 0, &v) == OM_ERR_INVALID_ARGUMENT);
  CHECK(om_cm_get(cm, 0, 0, nullptr) == OM_ERR_INVALID_ARGUMENT);
  CHECK(om_cm_copy(cm, &v, 1) == OM_ERR_INVALID_ARGUMENT);
  CHECK(om_log_negativity(cm, 1, 1, &v) == OM_ERR_INVALID_ARGUMENT);
  REQUIRE(om_cm_get(cm, 0, 0, &v) == OM_OK);
  CHECK(std::strlen(om_last_error()) == 0);
  const double centers[2] = {-1.0, 0.5};
  om_cm* out = nullptr;
  CHECK(om_output_cm(sys, centers, 2, 2 * std::numbers::pi, 1e-8, 1, &out) == OM_ERR_ORTHOGONALITY);
  om_cm_free(cm);
  om_system_free(sys);
  om_cm_free(nullptr);
  om_system_free(nullptr);
  CHECK(om_cm_dim(nullptr) == 0);
}

TEST_CASE("C API: output CM, tripartite and spectrum") {
  om_system* sys = nullptr;
  REQUIRE(om_system_parse(fixtures::set_b_yaml, &sys) == OM_OK);
  const double centers[2] = {-1.0, 1.0};
  om_cm* out = nullptr;
  REQUIRE(om_output_cm(sys, centers, 2, std::numbers::pi, 1e-8, 1, &out) == OM_OK);
  CHECK(om_cm_dim(out) == 6);
  double cuts[3];
  int full = 0;
  REQUIRE(om_tripartite(out, cuts, &full) == OM_OK);
  CHECK(full == 1);
  double nu = 0.0;
  REQUIRE(om_cm_min_symplectic(out, &nu) == OM_OK);
  CHECK(nu >= 0.5 - 1e-8);
  om_cm_free(out);

  const double omegas[3] = {-1.0, 0.0, 1.0};
  double s[3];
  REQUIRE(om_output_spectrum(sys, omegas, 3, 1, s) == OM_OK);
  CHECK(s[2] > s[0]);
  CHECK(s[0] > 0.0);
  om_system_free(sys);
}

TEST_CASE("C API: options defaults and verify report") {
  om_run_options ro;
  om_run_options_init(&ro);
  CHECK(ro.threads == 1);
  CHECK(ro.output_dir == nullptr);
  om_verify_options vo;
  om_verify_options_init(&vo);
  CHECK(vo.trajectories > 0);

  const om_rates rates{0.5, 0.05, 0.1, 1.0, 1.0, 0.7};
  om_system* sys = nullptr;
  REQUIRE(om_system_from_rates(&rates, &sys) == OM_OK);
  vo.trajectories = 2000;
  char* report = nullptr;
  int all = 0;
  REQUIRE(om_verify(sys, &vo, &report, &all) == OM_OK);
  REQUIRE(report != nullptr);
  CHECK(std::string(report).find("lyapunov_vs_spectral") != std::string::npos);
  om_string_free(report);
  om_system_free(sys);
  CHECK(std::string(om_version()) == "0.1.0");
}

TEST_CASE("C API: sweep run") {
  const fixtures::ScratchDir dir("capi");
  dir.write("sys.yaml", fixtures::set_b_yaml);
  const auto cfg = dir.write("tiny.yaml",
                             "name: tiny\nsystem: sys.yaml\n"
                             "axes:\n  - {param: temperature, scale: values, values: [0.1 K, 1 K]}\n"
                             "observables: [intracavity]\n");
  om_run_options ro;
  om_run_options_init(&ro);
  const std::string out = dir.path().string();
  ro.output_dir = out.c_str();
  om_sweep_summary s;
  REQUIRE(om_run_sweep(cfg.string().c_str(), &ro, &s) == OM_OK);
  CHECK(s.points == 2);
  CHECK(std::filesystem::exists(s.data_path));
  CHECK(std::filesystem::exists(s.provenance_path));
  CHECK(s.svg_path[0] == '\0');
  CHECK(om_run_sweep((dir.path() / "nope.yaml").string().c_str(), &ro, &s) != OM_OK);
}
