#pragma once

#include "lorpl2/lattice.hpp"
#include "lorpl2/moments.hpp"
#include "lorpl2/real.hpp"

#include <string>

namespace lorpl2 {

// Moment matrix over the globally ordered monomials of levels 0..n.
struct MomentMatrix {
  int n = 0;
  Mat M;
  Real det = 0;

  // M_{k,l} = L(phi_k phi_l^T), shape (k+1) x (l+1).
  Mat block(int k, int l) const;
};

MomentMatrix build_moment_matrix(const MomentProvider& p, int n);

struct Definiteness {
  bool positive = false;
  Real min_pivot_ratio = 0;  // smallest pivot over the largest diagonal entry
};

// Pivoted LDL^T; positive iff every pivot exceeds tol * max diagonal.
Definiteness check_definiteness(const Mat& M, const Real& tol);
bool is_positive_definite(const MomentMatrix& m, const Real& tol);

// phi_n monomial vector at a point and its exact partial derivatives.
Vec evaluate_monomial_vector(int n, const Real& x, const Real& y);
Vec derivative_monomial_vector(int n, const Real& x, const Real& y, int axis);

struct OrthoOptions {
  // Smallest admissible Cholesky pivot relative to the largest diagonal.
  double min_pivot_ratio = 1e-30;
};

// Orthonormal vectors varphi_0..varphi_N. Row r of coefficients() holds the
// expansion of component r (global order) over the monomial lattice.
class OrthoSystem {
 public:
  OrthoSystem() = default;
  OrthoSystem(Mat coefficients, int max_level, ProviderPtr provider, Real min_pivot_ratio = 0);

  int max_level() const { return N_; }
  const Mat& coefficients() const { return C_; }
  const ProviderPtr& provider() const { return provider_; }
  Real min_pivot_ratio() const { return min_pivot_ratio_; }

  // A^{(n)}_i of shape (n+1) x (i+1).
  Mat block(int n, int i) const;
  // Rows of varphi_n over the monomials of levels 0..n.
  Mat level_rows(int n) const;
  // Condition number of the leading block A^{(n)}_n.
  Real leading_condition(int n) const;

  Vec evaluate_phi(int n, const Real& x, const Real& y) const;
  Vec derivative_phi(int n, const Real& x, const Real& y, int axis) const;
  // Stacked varphi_0..varphi_n.
  Vec evaluate_upto(int n, const Real& x, const Real& y) const;

 private:
  Mat C_;
  int N_ = -1;
  ProviderPtr provider_;
  Real min_pivot_ratio_ = 0;
};

OrthoSystem orthonormalize(ProviderPtr provider, int N, const OrthoOptions& opts = {});

// <varphi_n, varphi_m^T> from the provider's moments.
Mat system_gram(const OrthoSystem& s, int n, int m);
// max over n, m <= upto of |<varphi_n, varphi_m^T> - delta I|.
Real orthonormality_defect(const OrthoSystem& s, int upto);

std::string ortho_to_json(const OrthoSystem& s);
// The provider must be the one the system was built from; its fingerprint is checked.
OrthoSystem ortho_from_json(const std::string& text, ProviderPtr provider);

}  // namespace lorpl2
