#pragma once

#include <cmath>
#include <vector>

namespace bem2d {

// Gauss-Legendre rule mapped to [0,1].
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  std::vector<double> complement;  // 1 - nodes[i] without rounding; empty for plain Gauss
  int size() const { return static_cast<int>(nodes.size()); }
  double one_minus(int i) const {
    return complement.empty() ? 1.0 - nodes[static_cast<std::size_t>(i)] : complement[static_cast<std::size_t>(i)];
  }
};

inline constexpr int kMaxGaussOrder = 64;

// Thread-safe; rules are built once for n = 1..kMaxGaussOrder.
const QuadratureRule& gauss_legendre(int n);

// Gauss-Legendre nodes with modified weights for logarithmic endpoint factors:
//   int_0^1 p(t) log(t) dt     ~ sum_i log_left[i]  p(t_i)
//   int_0^1 p(t) log(1-t) dt   ~ sum_i log_right[i] p(t_i)
// exact for polynomials p of degree < n.
struct LogWeightedRule {
  QuadratureRule base;
  std::vector<double> log_left;
  std::vector<double> log_right;
};

const LogWeightedRule& log_weighted_gauss(int n);

// Gauss rule on [a,b] for f, with the substitution t = a + (b-a) w^q applied
// towards an endpoint carrying an algebraic singularity. For a singularity of
// type r^(k/7) the substituted integrand is polynomial-like for q = 7.
inline constexpr int kSingularSubstitution = 7;

// 2n-point rule on [0,1]: n-point Gauss on each half with the substitution
// above towards the outer end. Nodes ascending; the right half keeps its
// distances to 1 in `complement`, which rounding of the nodes would destroy.
const QuadratureRule& graded_gauss(int n);

template <class F>
double integrate_interval(double a, double b, F&& f, int order, bool singular_left = false, bool singular_right = false) {
  const QuadratureRule& g = gauss_legendre(order);
  const double len = b - a;
  if (singular_left && singular_right) {
    const double m = 0.5 * (a + b);
    return integrate_interval(a, m, f, order, true, false) + integrate_interval(m, b, f, order, false, true);
  }
  double sum = 0.0;
  if (!singular_left && !singular_right) {
    for (int i = 0; i < g.size(); ++i) sum += g.weights[i] * f(a + len * g.nodes[i]);
    return len * sum;
  }
  constexpr int q = kSingularSubstitution;
  for (int i = 0; i < g.size(); ++i) {
    const double w = g.nodes[i];
    const double wq1 = std::pow(w, q - 1);
    const double t = singular_left ? a + len * wq1 * w : b - len * wq1 * w;
    sum += g.weights[i] * q * wq1 * f(t);
  }
  return len * sum;
}

}  // namespace bem2d
