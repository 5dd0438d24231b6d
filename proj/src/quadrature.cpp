#include "bem2d/quadrature.hpp"

#include <numbers>
#include <string>
#include <utility>

#include "bem2d/errors.hpp"

namespace bem2d {

namespace {

// P_n(x) and P_{n-1}(x) by the three-term recurrence.
std::pair<double, double> legendre(int n, double x) {
  double p0 = 1.0, p1 = x;
  for (int k = 2; k <= n; ++k) {
    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  return {p1, p0};
}

QuadratureRule build_gauss(int n) {
  QuadratureRule r;
  r.nodes.resize(static_cast<std::size_t>(n));
  r.weights.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      const auto [p, pm] = legendre(n, x);
      const double dx = p / (n * (x * p - pm) / (x * x - 1.0));
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const auto [p, pm] = legendre(n, x);
    const double dp = n * (x * p - pm) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    // x runs downward from near 1; store ascending on [0,1]
    const auto lo = static_cast<std::size_t>(i), hi = static_cast<std::size_t>(n - 1 - i);
    r.nodes[lo] = 0.5 * (1.0 - x);
    r.nodes[hi] = 0.5 * (1.0 + x);
    r.weights[lo] = r.weights[hi] = 0.5 * w;
  }
  if (n % 2 == 1) r.nodes[static_cast<std::size_t>(n / 2)] = 0.5;
  return r;
}

LogWeightedRule build_log_weighted(int n) {
  LogWeightedRule r;
  r.base = build_gauss(n);
  const auto un = static_cast<std::size_t>(n);
  r.log_left.assign(un, 0.0);
  r.log_right.assign(un, 0.0);
  // Expand p in shifted Legendre polynomials (exact by Gauss for deg < n) and
  // integrate each against log t and log(1-t) in closed form.
  for (std::size_t i = 0; i < un; ++i) {
    const double t = r.base.nodes[i];
    const double xi = 2.0 * t - 1.0;
    double p0 = 1.0, p1 = xi;
    for (int k = 0; k < n; ++k) {
      double pk;
      if (k == 0) {
        pk = 1.0;
      } else if (k == 1) {
        pk = xi;
      } else {
        const double p2 = ((2.0 * k - 1.0) * xi * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
        pk = p2;
      }
      const double c = (2.0 * k + 1.0) * r.base.weights[i] * pk;
      double m_left, m_right;
      if (k == 0) {
        m_left = m_right = -1.0;
      } else {
        const double kk = static_cast<double>(k) * (k + 1.0);
        m_left = (k % 2 == 1 ? 1.0 : -1.0) / kk;
        m_right = -1.0 / kk;
      }
      r.log_left[i] += c * m_left;
      r.log_right[i] += c * m_right;
    }
  }
  return r;
}

QuadratureRule build_graded(const QuadratureRule& g) {
  constexpr int q = kSingularSubstitution;
  QuadratureRule r;
  const auto n = g.nodes.size();
  r.nodes.resize(2 * n);
  r.weights.resize(2 * n);
  r.complement.resize(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    const double w = g.nodes[i];
    const double wq1 = std::pow(w, q - 1);
    const double near = 0.5 * wq1 * w;
    r.nodes[i] = near;
    r.complement[i] = 1.0 - near;
    r.weights[i] = 0.5 * q * wq1 * g.weights[i];
    r.nodes[2 * n - 1 - i] = 1.0 - near;
    r.complement[2 * n - 1 - i] = near;
    r.weights[2 * n - 1 - i] = 0.5 * q * wq1 * g.weights[i];
  }
  return r;
}

struct RuleTable {
  std::vector<QuadratureRule> gauss;
  std::vector<LogWeightedRule> log_weighted;
  std::vector<QuadratureRule> graded;
  RuleTable() {
    gauss.reserve(kMaxGaussOrder + 1);
    log_weighted.reserve(kMaxGaussOrder + 1);
    graded.reserve(kMaxGaussOrder + 1);
    gauss.emplace_back();
    log_weighted.emplace_back();
    graded.emplace_back();
    for (int n = 1; n <= kMaxGaussOrder; ++n) {
      gauss.push_back(build_gauss(n));
      log_weighted.push_back(build_log_weighted(n));
      graded.push_back(build_graded(gauss.back()));
    }
  }
};

const RuleTable& table() {
  static const RuleTable t;
  return t;
}

void check_order(int n) {
  if (n < 1 || n > kMaxGaussOrder)
    throw InvalidInput("quadrature order " + std::to_string(n) + " outside 1.." + std::to_string(kMaxGaussOrder));
}

}  // namespace

const QuadratureRule& gauss_legendre(int n) {
  check_order(n);
  return table().gauss[static_cast<std::size_t>(n)];
}

const LogWeightedRule& log_weighted_gauss(int n) {
  check_order(n);
  return table().log_weighted[static_cast<std::size_t>(n)];
}

const QuadratureRule& graded_gauss(int n) {
  check_order(n);
  return table().graded[static_cast<std::size_t>(n)];
}

}  // namespace bem2d
