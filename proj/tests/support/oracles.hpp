#pragma once

// Reference computations used only by the tests. None of them call into the
// code they check: quadratures go through Boost's tanh-sinh rule on the raw
// kernel, linear algebra is dense textbook code.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "bem2d/geometry.hpp"
#include "bem2d/mesh.hpp"

namespace oracle {

using bem2d::Segment;
using bem2d::Vec2;

inline constexpr double kInvTwoPi = 0.5 / std::numbers::pi;

// int_B log|x-y| ds_y, split at the point of B closest to x. Works in
// coordinates centred at x so tiny panels far from the origin keep precision.
inline double log_potential(const Segment& b_in, Vec2 x_in) {
  thread_local boost::math::quadrature::tanh_sinh<double> ts(12);
  const Segment b{{b_in.a.x - x_in.x, b_in.a.y - x_in.y}, {b_in.b.x - x_in.x, b_in.b.y - x_in.y}};
  const Vec2 x{0.0, 0.0};
  const Vec2 d = b.b - b.a;
  const double len = std::hypot(d.x, d.y);
  double t0 = ((x.x - b.a.x) * d.x + (x.y - b.a.y) * d.y) / (len * len);
  t0 = std::clamp(t0, 0.0, 1.0);
  auto f = [&](double t) {
    const double rx = x.x - (b.a.x + t * d.x), ry = x.y - (b.a.y + t * d.y);
    const double r2 = rx * rx + ry * ry;
    return r2 > 0.0 ? 0.5 * std::log(r2) : 0.0;
  };
  double sum = 0.0;
  // slivers below 1e-13 of the panel change nothing at double precision
  if (t0 > 1e-13) sum += ts.integrate(f, 0.0, t0, 1e-15);
  if (t0 < 1.0 - 1e-13) sum += ts.integrate(f, t0, 1.0, 1e-15);
  return len * sum;
}

// Galerkin entry int_A int_B -(1/2pi) log|x-y|.
inline double slp_entry(const Segment& a_in, const Segment& b_in) {
  thread_local boost::math::quadrature::tanh_sinh<double> ts(10);
  const Vec2 o = a_in.a;
  const Segment a{{0.0, 0.0}, {a_in.b.x - o.x, a_in.b.y - o.y}};
  const Segment b{{b_in.a.x - o.x, b_in.a.y - o.y}, {b_in.b.x - o.x, b_in.b.y - o.y}};
  const Vec2 d = a.b - a.a;
  const double len = std::hypot(d.x, d.y);
  auto outer = [&](double t) { return oracle::log_potential(b, {a.a.x + t * d.x, a.a.y + t * d.y}); };
  return -kInvTwoPi * len * ts.integrate(outer, 0.0, 1.0, 1e-13);
}

// Dense CG without preconditioner; returns all iterates x_0..x_m.
inline std::vector<Eigen::VectorXd> cg_iterates(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, int steps) {
  std::vector<Eigen::VectorXd> xs;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(b.size());
  Eigen::VectorXd r = b, p = r;
  xs.push_back(x);
  for (int k = 0; k < steps; ++k) {
    const double rr = r.dot(r);
    if (rr == 0.0) break;
    const Eigen::VectorXd ap = a * p;
    const double alpha = rr / p.dot(ap);
    x += alpha * p;
    r -= alpha * ap;
    p = r + (r.dot(r) / rr) * p;
    xs.push_back(x);
  }
  return xs;
}

// Smallest cardinality over all subsets with sum >= theta^2 * total.
inline int doerfler_minimum(const std::vector<double>& eta_sq, double theta) {
  const int n = static_cast<int>(eta_sq.size());
  double total = 0.0;
  for (double v : eta_sq) total += v;
  int best = n + 1;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    double s = 0.0;
    int c = 0;
    for (int i = 0; i < n; ++i)
      if (mask & (1u << i)) s += eta_sq[static_cast<std::size_t>(i)], ++c;
    if (s >= theta * theta * total * (1.0 - 1e-15)) best = std::min(best, c);
  }
  return best;
}

// Dense prolongation from mesh `coarse` to a refinement `fine` (element of
// fine inside element of coarse -> 1), found by comparing arclength intervals.
inline Eigen::MatrixXd prolongation(const bem2d::Mesh& coarse, const bem2d::Mesh& fine) {
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(fine.size()), static_cast<Eigen::Index>(coarse.size()));
  for (std::size_t i = 0; i < fine.size(); ++i) {
    const Vec2 mid = fine[i].segment.midpoint();
    for (std::size_t j = 0; j < coarse.size(); ++j) {
      if (bem2d::distance(coarse[j].segment, mid) < 1e-14 && fine[i].h <= coarse[j].h * (1 + 1e-14)) {
        p(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = 1.0;
        break;
      }
    }
  }
  return p;
}

// P^{-1} assembled from its defining sum with dense matrices. Haar energies
// are quadratic forms of the level matrices; the new node sets are found by
// comparing neighbouring element lengths between consecutive levels.
inline Eigen::MatrixXd multilevel_inverse(const std::vector<bem2d::Mesh>& levels, const std::vector<Eigen::MatrixXd>& matrices) {
  const bem2d::Mesh& finest = levels.back();
  const auto nl = static_cast<Eigen::Index>(finest.size());
  const std::size_t top = levels.size() - 1;
  // I_{l,L}
  std::vector<Eigen::MatrixXd> to_finest(levels.size());
  to_finest[top] = Eigen::MatrixXd::Identity(nl, nl);
  for (std::size_t l = top; l-- > 0;) to_finest[l] = to_finest[l + 1] * prolongation(levels[l], levels[l + 1]);

  Eigen::MatrixXd pinv = to_finest[0] * matrices[0].inverse() * to_finest[0].transpose();
  for (std::size_t l = 1; l <= top; ++l) {
    const bem2d::Mesh& mesh = levels[l];
    const bem2d::Mesh& prev = levels[l - 1];
    const auto n = static_cast<Eigen::Index>(mesh.size());
    for (const bem2d::Node& nd : mesh.interior_nodes()) {
      // A node's support is unchanged iff both abutting elements also exist in prev.
      auto exists_in_prev = [&](int e) {
        for (std::size_t j = 0; j < prev.size(); ++j)
          if (prev[j].segment.a == mesh[static_cast<std::size_t>(e)].segment.a &&
              prev[j].segment.b == mesh[static_cast<std::size_t>(e)].segment.b)
            return true;
        return false;
      };
      if (exists_in_prev(nd.plus) && exists_in_prev(nd.minus)) continue;
      Eigen::VectorXd h = Eigen::VectorXd::Zero(n);
      h[nd.plus] = 1.0 / mesh[static_cast<std::size_t>(nd.plus)].h;
      h[nd.minus] = -1.0 / mesh[static_cast<std::size_t>(nd.minus)].h;
      const double energy = h.dot(matrices[l] * h);
      const Eigen::VectorXd col = to_finest[l] * h;
      pinv += col * col.transpose() / energy;
    }
  }
  return pinv;
}

// d/dt of (V psi)(x) for x inside panel `self` at distances sl, sr from its
// ends. Off-panel terms by quadrature of the raw kernel, the self panel by its
// principal value closed form.
inline double slp_tangent_derivative(const bem2d::Mesh& mesh, const std::vector<double>& coeffs, std::size_t self, Vec2 x,
                                     double sl, double sr) {
  thread_local boost::math::quadrature::tanh_sinh<double> ts(10);
  const Segment& ss = mesh[self].segment;
  const double hs = std::hypot(ss.b.x - ss.a.x, ss.b.y - ss.a.y);
  const Vec2 t{(ss.b.x - ss.a.x) / hs, (ss.b.y - ss.a.y) / hs};
  double sum = 0.0;
  for (std::size_t j = 0; j < mesh.size(); ++j) {
    if (coeffs[j] == 0.0) continue;
    if (j == self) {
      sum += coeffs[j] * -kInvTwoPi * (std::log(sl) - std::log(sr));
      continue;
    }
    const Segment& b = mesh[j].segment;
    const double hb = std::hypot(b.b.x - b.a.x, b.b.y - b.a.y);
    auto f = [&](double u) {
      const double rx = x.x - (b.a.x + u * (b.b.x - b.a.x)), ry = x.y - (b.a.y + u * (b.b.y - b.a.y));
      return (rx * t.x + ry * t.y) / (rx * rx + ry * ry);
    };
    sum += coeffs[j] * -kInvTwoPi * hb * ts.integrate(f, 0.0, 1.0, 1e-14);
  }
  return sum;
}

// eta_T^2 = h_T int_T (f' - (V psi)')^2 for constant f, each half of T
// integrated in the distance from its outer end.
inline double estimator_constant_rhs(const bem2d::Mesh& mesh, const std::vector<double>& coeffs, std::size_t i) {
  boost::math::quadrature::tanh_sinh<double> ts(10);
  const Segment& s = mesh[i].segment;
  const double h = std::hypot(s.b.x - s.a.x, s.b.y - s.a.y);
  auto half = [&](bool left) {
    auto f = [&](double v) {
      const double u = left ? v : 1.0 - v;
      const Vec2 x{s.a.x + u * (s.b.x - s.a.x), s.a.y + u * (s.b.y - s.a.y)};
      if (x == s.a || x == s.b) return 0.0;  // measure below roundoff
      const double d = slp_tangent_derivative(mesh, coeffs, i, x, left ? v * h : h - v * h, left ? h - v * h : v * h);
      return d * d;
    };
    return ts.integrate(f, 0.0, 0.5, 1e-12);
  };
  return h * h * (half(true) + half(false));
}

inline std::vector<double> ranks(const std::vector<double>& v) {
  std::vector<std::size_t> idx(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    for (std::size_t k = i; k <= j; ++k) r[idx[k]] = 0.5 * static_cast<double>(i + j);
    i = j + 1;
  }
  return r;
}

inline double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  const auto rx = ranks(x), ry = ranks(y);
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < rx.size(); ++i) mx += rx[i], my += ry[i];
  mx /= n, my /= n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

// Random mesh: n0 uniform elements refined by random markings until it has at least n elements.
inline bem2d::Mesh random_mesh(std::shared_ptr<const bem2d::BoundaryGeometry> g, int n0, std::size_t n, std::mt19937_64& rng) {
  bem2d::Mesh m = bem2d::make_initial_mesh(std::move(g), n0);
  while (m.size() < n) {
    std::uniform_int_distribution<int> pick(0, static_cast<int>(m.size()) - 1);
    const int marked[1] = {pick(rng)};
    m = bem2d::refine(m, marked);
  }
  return m;
}

}  // namespace oracle
