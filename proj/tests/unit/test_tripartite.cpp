#include "doctest.h"
#include "fixtures.hpp"

#include "error.hpp"
#include "output.hpp"
#include "tripartite.hpp"

#include <json.hpp>

#include <cmath>
#include <numbers>

using namespace optomech;

namespace {

Eigen::MatrixXd tms_with_vacuum(double r) {
  const double c = 0.5 * std::cosh(2 * r), s = 0.5 * std::sinh(2 * r);
  Eigen::MatrixXd V = 0.5 * Eigen::MatrixXd::Identity(6, 6);
  V(0, 0) = V(1, 1) = V(2, 2) = V(3, 3) = c;
  V(0, 2) = V(2, 0) = s;
  V(1, 3) = V(3, 1) = -s;
  return V;
}

Eigen::MatrixXd permute(const Eigen::MatrixXd& V, const std::array<int, 3>& order) {
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(6, 6);
  for (int k = 0; k < 3; ++k) P.block<2, 2>(2 * k, 2 * order[k]).setIdentity();
  return P * V * P.transpose();
}

}  // namespace

TEST_CASE("product vacuum sits on the separability boundary") {
  const auto rep = tripartite::classify_tripartite(CovarianceMatrix(0.5 * Eigen::MatrixXd::Identity(6, 6)));
  for (const auto& cut : rep.cuts) CHECK(std::abs(cut.value) < 1e-12);
  CHECK_FALSE(rep.fully_inseparable);
}

TEST_CASE("two-mode squeezing with a vacuum spectator") {
  const auto rep = tripartite::classify_tripartite(CovarianceMatrix(tms_with_vacuum(0.4)));
  CHECK(rep.cuts[0].value == doctest::Approx(0.5 * std::exp(-0.8) - 0.5));
  CHECK(rep.cuts[1].value == doctest::Approx(0.5 * std::exp(-0.8) - 0.5));
  CHECK(rep.cuts[2].value >= -1e-12);
  CHECK_FALSE(rep.fully_inseparable);
  CHECK(rep.cuts[0].name == "mechanics|rest");
  CHECK(rep.cuts[2].mode == 2);
}

TEST_CASE("cut values follow a permutation of the modes") {
  const auto r = fixtures::set_b_rates();
  const auto cm = output::output_cm(r, output::make_filter_bank({-1.0, 1.0}, std::numbers::pi)).cm;
  const auto base = tripartite::classify_tripartite(cm);
  const std::array<int, 3> order{2, 0, 1};
  const auto moved = tripartite::classify_tripartite(CovarianceMatrix(permute(cm.matrix(), order)));
  for (int k = 0; k < 3; ++k) CHECK(moved.cuts[k].value == doctest::Approx(base.cuts[order[k]].value).epsilon(1e-9));
}

TEST_CASE("mechanics, Stokes and anti-Stokes outputs are fully inseparable") {
  const auto cm = output::output_cm(fixtures::set_b_rates(), output::make_filter_bank({-1.0, 1.0}, std::numbers::pi)).cm;
  const auto rep = tripartite::classify_tripartite(cm);
  for (const auto& cut : rep.cuts) CHECK(cut.value < 0.0);
  CHECK(rep.fully_inseparable);

  const auto j = nlohmann::json::parse(tripartite::to_json(rep));
  REQUIRE(j["cuts"].size() == 3);
  CHECK(j["cuts"][1]["cut"] == "stokes|rest");
  CHECK(j["fully_inseparable"] == true);
}

TEST_CASE("tripartite classification needs three modes") {
  CHECK_THROWS_AS(tripartite::classify_tripartite(CovarianceMatrix(0.5 * Eigen::MatrixXd::Identity(4, 4))),
                  InvalidArgument);
}
