#pragma once

#include "lorpl2/real.hpp"

#include <functional>
#include <string>
#include <vector>

namespace lorpl2 {

// Gauss-Legendre nodes and weights on [-1, 1], ascending.
struct GaussRule {
  std::vector<Real> x;
  std::vector<Real> w;
};

// Cached per order; safe to call from several threads.
const GaussRule& gauss_legendre(int n);

struct QuadPolicy {
  double rel_tol = 1e-28;
  int start = 32;
  int cap = 4096;
};

struct QuadResult {
  Real value = 0;
  Real achieved = 0;  // relative gap between the last two orders
  int nodes = 0;
};

// Node doubling until two successive orders agree; throws QuadratureError.
QuadResult integrate(const std::function<Real(const Real&)>& f, const Real& a, const Real& b,
                     const QuadPolicy& policy = {});

enum class WeightKind { lebesgue, w1, w2, w3, w4, w5, w6 };

WeightKind parse_weight_kind(const std::string& name);
std::string weight_name(WeightKind k);

struct Weight1D {
  WeightKind kind = WeightKind::lebesgue;
  Real a = 1;
  Real b = 2;
  Real mu = 1;     // w3 exponent, mu > -1/2
  Real kappa = 1;  // w6 scale, kappa > 0

  void validate() const;
  // Density at x in (a, b).
  Real density(const Real& x) const;
  // Kinds with an inverse square root at both endpoints.
  bool endpoint_singular() const;
};

// m_k = integral of x^k w(x) over [a, b] for k = kmin..kmax.
std::vector<Real> univariate_moments(const Weight1D& w, int kmin, int kmax,
                                     const QuadPolicy& policy = {});

// Closed form for the plain weight on [a, b].
Real lebesgue_moment(const Real& a, const Real& b, int k);

}  // namespace lorpl2
