#pragma once

#include "lorpl2/ortho.hpp"
#include "lorpl2/quadrature.hpp"
#include "lorpl2/recurrence.hpp"

#include <array>
#include <vector>

namespace lorpl2 {

// One-variable orthonormal Laurent polynomials psi_0..psi_N. Position k of a
// coefficient vector multiplies x^{c_k}.
struct UnivariateSystem {
  int N = 0;
  int kmin = 0;
  std::vector<Real> moments;  // m_k for k = kmin, kmin+1, ...
  std::vector<Vec> psi;       // psi[n] has n+1 entries
  std::vector<Real> Omega;    // n = 0..N-1
  std::vector<Real> C;        // n = 0..N-1

  Real m(int k) const;
  Real evaluate(int n, const Real& x) const;
};

// moments[k - kmin] = m_k, needed for |k| <= N + 1.
UnivariateSystem build_univariate(const std::vector<Real>& moments, int kmin, int N);
UnivariateSystem build_univariate(const Weight1D& w, int N, const QuadPolicy& policy = {});

struct TensorSystem {
  UnivariateSystem sx, sy;
  int N = 0;
  OrthoSystem system;  // varphi_{n,k} = psi^x_{n-k}(x) psi^y_k(y) over the 2D lattice

  Real phi(int n, int k, const Real& x, const Real& y) const;
};

TensorSystem build_tensor(const UnivariateSystem& sx, const UnivariateSystem& sy, int N);

// Closed-form blocks of y + 1/y for the tensor family; sys_y needs N + 2 levels.
RecurrenceData explicit_f2_blocks(const UnivariateSystem& sys_y, int N);
// The x + 1/x counterpart, obtained by exchanging the variables.
RecurrenceData explicit_f1_blocks(const UnivariateSystem& sys_x, int N);

struct GammaDeltaXi {
  std::vector<Real> Gamma, Delta, Xi;
};
GammaDeltaXi gamma_delta_xi(const UnivariateSystem& s, int count);

struct LemmaReport {
  std::array<Real, 3> max_residual{};  // one per identity
  std::array<int, 3> checked{};
  int not_applicable = 0;
};

LemmaReport lemma_recurrences_check(const TensorSystem& t, int N, const std::vector<Point>& points);

}  // namespace lorpl2
