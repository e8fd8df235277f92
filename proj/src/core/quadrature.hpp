#pragma once

// Globally adaptive, vector-valued Gauss-Kronrod (7/15) quadrature.
//
// All components share one set of panels; the panel with the largest
// weighted error estimate is bisected until every component meets its
// tolerance. Integrals over the real line are split into a central window
// [-W, W] with caller-supplied breakpoints and two tails mapped onto (0, 1]
// by omega = +-W / x.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <queue>
#include <vector>

namespace optomech::numeric {

struct QuadratureOptions {
  double rel_tol = 1e-8;
  double abs_tol = 0.0;
  std::size_t max_evaluations = 4'000'000;
};

struct QuadratureResult {
  Eigen::VectorXd value;
  Eigen::VectorXd error;
  std::size_t evaluations = 0;
  bool converged = false;
  // max_i error_i / tolerance-scale_i
  double achieved = 0.0;
};

// Per-component tolerance scale from the current estimate. Defaults to |I_i|.
using ToleranceScale = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

namespace detail {

inline constexpr std::array<double, 8> kronrod_nodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kronrod_weights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights for kronrod_nodes[1], [3], [5], [7].
inline constexpr std::array<double, 4> gauss_weights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

enum class Map { Identity, UpperTail, LowerTail };

struct Panel {
  double a;
  double b;
  Map map;
  Eigen::VectorXd value;
  Eigen::VectorXd error;
};

template <class F>
Eigen::VectorXd evaluate_mapped(F& f, double x, Map map, double cutoff) {
  switch (map) {
    case Map::Identity:
      return f(x);
    case Map::UpperTail:
      return f(cutoff / x) * (cutoff / (x * x));
    case Map::LowerTail:
      return f(-cutoff / x) * (cutoff / (x * x));
  }
  return {};
}

template <class F>
void apply_rule(F& f, Panel& panel, double cutoff) {
  const double center = 0.5 * (panel.a + panel.b);
  const double half = 0.5 * (panel.b - panel.a);
  Eigen::VectorXd fc = evaluate_mapped(f, center, panel.map, cutoff);
  Eigen::VectorXd kronrod = kronrod_weights[7] * fc;
  Eigen::VectorXd gauss = gauss_weights[3] * fc;
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kronrod_nodes[j];
    Eigen::VectorXd sum = evaluate_mapped(f, center - dx, panel.map, cutoff);
    sum += evaluate_mapped(f, center + dx, panel.map, cutoff);
    kronrod += kronrod_weights[j] * sum;
    if (j % 2 == 1) gauss += gauss_weights[j / 2] * sum;
  }
  panel.value = kronrod * half;
  panel.error = ((kronrod - gauss) * half).cwiseAbs();
}

template <class F>
QuadratureResult integrate_segments(F&& f, std::vector<Panel> panels, Eigen::Index dim, double cutoff,
                                    const QuadratureOptions& opt, const ToleranceScale& scale_fn) {
  QuadratureResult result;
  result.value = Eigen::VectorXd::Zero(dim);
  result.error = Eigen::VectorXd::Zero(dim);
  for (auto& p : panels) {
    apply_rule(f, p, cutoff);
    result.evaluations += 15;
  }

  auto tolerance = [&](const Eigen::VectorXd& value) {
    Eigen::VectorXd s = scale_fn ? scale_fn(value) : Eigen::VectorXd(value.cwiseAbs());
    return Eigen::VectorXd((opt.rel_tol * s).cwiseMax(opt.abs_tol).cwiseMax(1e-300));
  };

  Eigen::VectorXd tol;
  using Entry = std::pair<double, std::size_t>;
  std::priority_queue<Entry> heap;
  std::size_t next_refresh = 0;

  auto refresh = [&] {
    result.value.setZero();
    result.error.setZero();
    for (const auto& p : panels) {
      result.value += p.value;
      result.error += p.error;
    }
    tol = tolerance(result.value);
    heap = {};
    for (std::size_t i = 0; i < panels.size(); ++i) {
      heap.emplace(panels[i].error.cwiseQuotient(tol).maxCoeff(), i);
    }
    next_refresh = 2 * panels.size() + 16;
  };
  refresh();

  while (true) {
    result.achieved = result.error.cwiseQuotient(tol).maxCoeff();
    if (result.achieved <= 1.0) {
      result.converged = true;
      break;
    }
    if (result.evaluations >= opt.max_evaluations || heap.empty()) break;

    const auto [key, index] = heap.top();
    heap.pop();
    Panel parent = panels[index];
    const double mid = 0.5 * (parent.a + parent.b);
    if (!(mid > parent.a && mid < parent.b) ||
        (parent.b - parent.a) <= 1e-13 * std::max(std::abs(parent.a), std::abs(parent.b))) {
      continue;  // cannot refine further; leave its error in the budget
    }
    Panel left{parent.a, mid, parent.map, {}, {}};
    Panel right{mid, parent.b, parent.map, {}, {}};
    apply_rule(f, left, cutoff);
    apply_rule(f, right, cutoff);
    result.evaluations += 30;
    result.value += left.value + right.value - parent.value;
    result.error += left.error + right.error - parent.error;
    result.error = result.error.cwiseMax(0.0);
    panels[index] = std::move(left);
    panels.push_back(std::move(right));
    heap.emplace(panels[index].error.cwiseQuotient(tol).maxCoeff(), index);
    heap.emplace(panels.back().error.cwiseQuotient(tol).maxCoeff(), panels.size() - 1);
    if (panels.size() >= next_refresh) refresh();
  }
  return result;
}

}  // namespace detail

// Integrates f over [breakpoints.front(), breakpoints.back()], with an initial
// panel between each pair of consecutive breakpoints.
template <class F>
QuadratureResult integrate(F&& f, std::vector<double> breakpoints, Eigen::Index dim,
                           const QuadratureOptions& opt = {}, const ToleranceScale& scale = {}) {
  std::sort(breakpoints.begin(), breakpoints.end());
  breakpoints.erase(std::unique(breakpoints.begin(), breakpoints.end()), breakpoints.end());
  std::vector<detail::Panel> panels;
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    panels.push_back({breakpoints[i], breakpoints[i + 1], detail::Map::Identity, {}, {}});
  }
  return detail::integrate_segments(f, std::move(panels), dim, 1.0, opt, scale);
}

// Integrates f over the whole real line. Breakpoints outside (-cutoff, cutoff)
// are dropped; the tails |omega| > cutoff are integrated exactly through the
// reciprocal map, so f must decay at least as 1/omega^2.
template <class F>
QuadratureResult integrate_real_line(F&& f, std::vector<double> breakpoints, double cutoff, Eigen::Index dim,
                                     const QuadratureOptions& opt = {}, const ToleranceScale& scale = {}) {
  std::erase_if(breakpoints, [&](double x) { return !(x > -cutoff && x < cutoff); });
  breakpoints.push_back(-cutoff);
  breakpoints.push_back(cutoff);
  std::sort(breakpoints.begin(), breakpoints.end());
  breakpoints.erase(std::unique(breakpoints.begin(), breakpoints.end()), breakpoints.end());
  std::vector<detail::Panel> panels;
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    panels.push_back({breakpoints[i], breakpoints[i + 1], detail::Map::Identity, {}, {}});
  }
  for (double lo : {0.0, 0.25, 0.5}) {
    const double hi = lo == 0.5 ? 1.0 : lo + 0.25;
    panels.push_back({lo, hi, detail::Map::UpperTail, {}, {}});
    panels.push_back({lo, hi, detail::Map::LowerTail, {}, {}});
  }
  return detail::integrate_segments(f, std::move(panels), dim, cutoff, opt, scale);
}

}  // namespace optomech::numeric
