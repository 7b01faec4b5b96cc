#pragma once

#include "lorpl2/ortho.hpp"
#include "lorpl2/recurrence.hpp"

#include <string>
#include <vector>

namespace lorpl2 {

// Relative band inside which t1 + 1/t1 and t2 + 1/t2 count as equal, and
// inside which x^2 counts as 1 for the confluent form.
inline constexpr double kDegeneracyBand = 1e-8;

class KernelEvaluator {
 public:
  KernelEvaluator(OrthoSystem system, RecurrenceData data);

  const OrthoSystem& system() const { return system_; }
  const RecurrenceData& data() const { return data_; }
  // Largest n usable by the direct sum.
  int max_level() const { return system_.max_level(); }
  // Largest n usable by the Christoffel-Darboux and confluent forms.
  int max_cd_level() const { return system_.max_level() - 2; }

  Real kernel(int n, const Real& x1, const Real& y1, const Real& x2, const Real& y2) const;
  Real kernel_cd(int n, const Real& x1, const Real& y1, const Real& x2, const Real& y2,
                 int axis) const;
  Real kernel_confluent(int n, const Real& x, const Real& y, int axis) const;

  // K_n(., .; x, y) as coefficients over the monomials of levels 0..n.
  Vec kernel_coefficients(int n, const Real& x, const Real& y) const;

 private:
  OrthoSystem system_;
  RecurrenceData data_;
};

struct HarrisReport {
  bool passed = false;
  bool lagrange_ok = false;
  bool condition_i = false;   // zeta_i - lambda_i K_{p-1}(., x_i) orthogonal to L_{p-1}
  bool condition_ii = false;  // interpolation remainder orthogonal to L_{p-1}
  bool exactness_checked = false;
  bool exactness_ok = false;
  Real lagrange_error = 0;
  Real condition_i_error = 0;
  Real condition_ii_error = 0;
  Real exactness_error = 0;
  int exactness_basis_size = 0;
  std::vector<std::string> failures;
};

struct HarrisNode {
  Real x, y;
};

// lagrange[i] holds zeta_i over the monomials of levels 0..p.
HarrisReport verify_harris(const KernelEvaluator& ev, int p, const std::vector<HarrisNode>& nodes,
                           const std::vector<Real>& weights, const std::vector<Vec>& lagrange,
                           double tol = 1e-9);

// Value of a coefficient vector over the monomials of levels 0..n.
Real evaluate_lattice_poly(const Vec& coeffs, int n, const Real& x, const Real& y);

}  // namespace lorpl2
