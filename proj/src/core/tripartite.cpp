#include "tripartite.hpp"

#include "error.hpp"
#include "gaussian.hpp"

#include "json.hpp"

namespace optomech::tripartite {

TripartiteReport classify_tripartite(const CovarianceMatrix& cm) {
  if (cm.modes() != 3) throw InvalidArgument("three-mode covariance matrix expected");
  static constexpr std::array<const char*, 3> names{"mechanics|rest", "stokes|rest", "anti_stokes|rest"};
  TripartiteReport rep;
  rep.fully_inseparable = true;
  for (int m = 0; m < 3; ++m) {
    const double nu = gaussian::symplectic_spectrum(gaussian::partial_transpose(cm, {m}).matrix()).front();
    rep.cuts[m] = {names[m], m, nu - 0.5};
    rep.fully_inseparable = rep.fully_inseparable && rep.cuts[m].value < 0.0;
  }
  return rep;
}

std::string to_json(const TripartiteReport& report) {
  nlohmann::ordered_json j;
  for (const auto& cut : report.cuts) j["cuts"].push_back({{"cut", cut.name}, {"min_pt_eigenvalue_minus_half", cut.value}});
  j["fully_inseparable"] = report.fully_inseparable;
  return j.dump();
}

}  // namespace optomech::tripartite
