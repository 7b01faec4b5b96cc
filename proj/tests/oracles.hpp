#pragma once

// Reference computations that avoid the library's moment pathway: direct
// quadrature of products of evaluated functions, direct atom sums, and
// hand-rolled enumerations.

#include "lorpl2/moments.hpp"
#include "lorpl2/ortho.hpp"
#include "lorpl2/recurrence.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <functional>
#include <random>
#include <vector>

namespace oracle {

using lorpl2::Mat;
using lorpl2::Point;
using lorpl2::Real;
using lorpl2::Vec;

inline std::vector<Point> random_points(int n, double x0, double x1, double y0, double y1,
                                        unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(x0, x1), uy(y0, y1);
  std::vector<Point> p;
  for (int k = 0; k < n; ++k) p.push_back({Real(ux(rng)), Real(uy(rng))});
  return p;
}

// Tensor Gauss-Legendre in quad precision on [a,b] x [c,d].
struct Grid {
  std::vector<Real> x, y, w;
};

inline Grid product_grid(const Real& a, const Real& b, const Real& c, const Real& d,
                         const std::function<Real(const Real&, const Real&)>& density) {
  using Rule = boost::math::quadrature::gauss<Real, 60>;
  const auto& abs = Rule::abscissa();
  const auto& wts = Rule::weights();
  std::vector<Real> t, tw;
  for (std::size_t k = 0; k < abs.size(); ++k) {
    t.push_back(abs[k]);
    tw.push_back(wts[k]);
    if (abs[k] != 0) {
      t.push_back(-abs[k]);
      tw.push_back(wts[k]);
    }
  }
  Grid g;
  for (std::size_t i = 0; i < t.size(); ++i)
    for (std::size_t j = 0; j < t.size(); ++j) {
      Real x = (a + b) / 2 + (b - a) / 2 * t[i];
      Real y = (c + d) / 2 + (d - c) / 2 * t[j];
      g.x.push_back(x);
      g.y.push_back(y);
      g.w.push_back(tw[i] * tw[j] * (b - a) * (d - c) / 4 * density(x, y));
    }
  return g;
}

inline Grid atom_grid(const std::vector<lorpl2::Atom>& atoms) {
  Grid g;
  for (const auto& a : atoms) {
    g.x.push_back(a.x);
    g.y.push_back(a.y);
    g.w.push_back(a.w);
  }
  return g;
}

// max over n, m <= upto of |sum_k w_k phi_n(p_k) phi_m(p_k)^T - delta I|.
inline Real gram_defect(const lorpl2::OrthoSystem& s, int upto, const Grid& g) {
  const Eigen::Index D = lorpl2::dim_L(upto);
  Mat G = Mat::Zero(D, D);
  for (std::size_t k = 0; k < g.w.size(); ++k) {
    Vec v = s.evaluate_upto(upto, g.x[k], g.y[k]);
    G += g.w[k] * v * v.transpose();
  }
  return lorpl2::max_abs(G - Mat::Identity(D, D));
}

// Off-axis atoms with positive weights in [0.5, 2.5]^2, total mass 1.
inline std::vector<lorpl2::Atom> random_atoms(int n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.5, 2.5), w(0.5, 1.5);
  std::vector<lorpl2::Atom> atoms;
  Real total = 0;
  for (int k = 0; k < n; ++k) {
    atoms.push_back({Real(u(rng)), Real(u(rng)), Real(w(rng))});
    total += atoms.back().w;
  }
  for (auto& a : atoms) a.w /= total;
  return atoms;
}

inline Real one(const Real&, const Real&) { return 1; }

}  // namespace oracle
