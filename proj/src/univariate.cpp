#include "lorpl2/univariate.hpp"

#include "lorpl2/error.hpp"

namespace lorpl2 {

Real UnivariateSystem::m(int k) const {
  int idx = k - kmin;
  if (idx < 0 || idx >= int(moments.size()))
    throw WindowExceeded(k, 0, std::min(-kmin, kmin + int(moments.size()) - 1));
  return moments[idx];
}

Real UnivariateSystem::evaluate(int n, const Real& x) const {
  if (x == 0) throw AxisEvaluation();
  if (n < 0 || n > N) throw InvalidArgument("univariate: level outside range");
  Real s = 0;
  for (int k = 0; k <= n; ++k) s += psi[n](k) * boost::multiprecision::pow(x, c_seq(k));
  return s;
}

namespace {

// <x^shift p, q> for coefficient vectors in the balanced 1D ordering.
Real inner(const UnivariateSystem& s, const Vec& p, const Vec& q, int shift) {
  Real r = 0;
  for (Eigen::Index a = 0; a < p.size(); ++a) {
    if (p(a) == 0) continue;
    for (Eigen::Index b = 0; b < q.size(); ++b)
      if (q(b) != 0) r += p(a) * q(b) * s.m(c_seq(int(a)) + c_seq(int(b)) + shift);
  }
  return r;
}

// Coefficients of x^e * p, landing in a vector of length len.
Vec times_power(const Vec& p, int e, int len) {
  Vec out = Vec::Zero(len);
  for (Eigen::Index a = 0; a < p.size(); ++a)
    if (p(a) != 0) {
      int pos = inv_c(c_seq(int(a)) + e);
      if (pos >= len) throw std::logic_error("univariate shift left the target space");
      out(pos) += p(a);
    }
  return out;
}

Vec padded(const Vec& p, int len) {
  Vec out = Vec::Zero(len);
  out.head(p.size()) = p;
  return out;
}

}  // namespace

UnivariateSystem build_univariate(const std::vector<Real>& moments, int kmin, int N) {
  using boost::multiprecision::sqrt;
  if (N < 0) throw InvalidArgument("build_univariate: negative level");
  UnivariateSystem s;
  s.N = N;
  s.kmin = kmin;
  s.moments = moments;
  Real m0 = s.m(0);
  if (!(m0 > 0)) throw NotPositiveDefinite("univariate: m_0 must be positive", 0);
  if (N >= 1 && !(s.m(1) > 0)) throw InvalidArgument("univariate: m_1 must be positive");
  s.psi.push_back(Vec::Constant(1, 1 / sqrt(m0)));
  for (int n = 0; n < N; ++n) {
    const Vec& p = s.psi[n];
    const int len = n + 2;
    Real om;
    Vec q;
    if (n % 2 == 0) {
      Real g = inner(s, p, p, 1);
      if (!(g > 0)) throw NotPositiveDefinite("univariate: <x psi_n, psi_n> not positive", n);
      om = 1 / g;
      q = om * times_power(p, 1, len) - padded(p, len);
    } else {
      Real g = inner(s, p, p, -1);
      if (!(g > 0)) throw NotPositiveDefinite("univariate: <psi_n / x, psi_n> not positive", n);
      om = 1 / g;
      q = padded(p, len) - om * times_power(p, -1, len);
    }
    if (n >= 1) q -= s.C[n - 1] * padded(s.psi[n - 1], len);
    Real c2 = inner(s, q, q, 0);
    if (!(c2 > 0))
      throw NotPositiveDefinite("univariate: C_" + std::to_string(n) + "^2 <= 0", n + 1);
    Real c = sqrt(c2);
    s.Omega.push_back(om);
    s.C.push_back(c);
    s.psi.push_back(q / c);
  }
  return s;
}

UnivariateSystem build_univariate(const Weight1D& w, int N, const QuadPolicy& policy) {
  int W = N + 1;
  return build_univariate(univariate_moments(w, -W, W, policy), -W, N);
}

Real TensorSystem::phi(int n, int k, const Real& x, const Real& y) const {
  if (k < 0 || k > n) throw InvalidArgument("tensor: k outside 0..n");
  return sx.evaluate(n - k, x) * sy.evaluate(k, y);
}

TensorSystem build_tensor(const UnivariateSystem& sx, const UnivariateSystem& sy, int N) {
  if (sx.N < N || sy.N < N) throw InvalidArgument("build_tensor: univariate systems too short");
  TensorSystem t;
  t.sx = sx;
  t.sy = sy;
  t.N = N;
  Mat C = Mat::Zero(dim_L(N), dim_L(N));
  for (int n = 0; n <= N; ++n)
    for (int k = 0; k <= n; ++k) {
      const Vec& px = sx.psi[n - k];
      const Vec& py = sy.psi[k];
      for (Eigen::Index a = 0; a < px.size(); ++a)
        for (Eigen::Index b = 0; b < py.size(); ++b)
          C(level_offset(n) + k, level_offset(int(a + b)) + b) = px(a) * py(b);
    }
  auto avail = [](const UnivariateSystem& s) {
    return std::min(-s.kmin, s.kmin + int(s.moments.size()) - 1);
  };
  int W = std::min(avail(sx), avail(sy));
  std::map<std::pair<int, int>, Real> e;
  for (int i = -W; i <= W; ++i)
    for (int j = -W; j <= W; ++j) e[{i, j}] = sx.m(i) * sy.m(j);
  t.system = OrthoSystem(std::move(C), N, std::make_shared<TableProvider>(std::move(e), W));
  return t;
}

GammaDeltaXi gamma_delta_xi(const UnivariateSystem& s, int count) {
  if (int(s.Omega.size()) < count + 1)
    throw InvalidArgument("gamma_delta_xi: univariate system too short");
  GammaDeltaXi g;
  for (int l = 0; l < count; ++l) {
    const Real& Ol = s.Omega[l];
    const Real& Ol1 = s.Omega[l + 1];
    Real Cm1 = l >= 1 ? s.C[l - 1] : Real(0);
    Real Om1 = l >= 1 ? s.Omega[l - 1] : Real(1);  // C_{-1} = 0 makes this arbitrary
    g.Gamma.push_back(s.C[l] * s.C[l + 1] / Ol1);
    g.Delta.push_back((l % 2 == 0 ? 1 : -1) * s.C[l] * (1 / Ol - 1 / Ol1));
    g.Xi.push_back(Ol + 1 / Ol + s.C[l] * s.C[l] / Ol1 + Cm1 * Cm1 / Om1);
  }
  return g;
}

namespace {

RecurrenceData explicit_blocks(const UnivariateSystem& s, int N, int axis) {
  // Coefficients up to index N are needed, which uses Omega_{N+1}, C_{N+1}.
  GammaDeltaXi g = gamma_delta_xi(s, N + 1);
  RecurrenceData d;
  d.N = N;
  // Along axis 2 the y-degree index of varphi_{L,l} is l; along axis 1 the
  // x-degree index is L - l, which reverses each level.
  auto idx = [axis](int L, int l) { return axis == 2 ? l : L - l; };
  for (int L = 0; L <= N; ++L) {
    Mat diag = Mat::Zero(L + 1, L + 1);
    for (int l = 0; l <= L; ++l) diag(l, l) = g.Xi[idx(L, l)];
    d.blocks[{L, L, axis}] = diag;
    if (L + 1 <= N) {
      Mat up1 = Mat::Zero(L + 1, L + 2);
      for (int l = 0; l <= L; ++l) up1(l, axis == 2 ? l + 1 : l) = g.Delta[idx(L, l)];
      d.blocks[{L, L + 1, axis}] = up1;
      d.blocks[{L + 1, L, axis}] = up1.transpose();
    }
    if (L + 2 <= N) {
      Mat up2 = Mat::Zero(L + 1, L + 3);
      for (int l = 0; l <= L; ++l) up2(l, axis == 2 ? l + 2 : l) = g.Gamma[idx(L, l)];
      d.blocks[{L, L + 2, axis}] = up2;
      d.blocks[{L + 2, L, axis}] = up2.transpose();
    }
  }
  return d;
}

}  // namespace

RecurrenceData explicit_f2_blocks(const UnivariateSystem& sys_y, int N) {
  return explicit_blocks(sys_y, N, 2);
}

RecurrenceData explicit_f1_blocks(const UnivariateSystem& sys_x, int N) {
  return explicit_blocks(sys_x, N, 1);
}

LemmaReport lemma_recurrences_check(const TensorSystem& t, int N, const std::vector<Point>& points) {
  if (N > t.N) throw InvalidArgument("lemma check: tensor system too short");
  LemmaReport r;
  const auto& Om = t.sy.Omega;
  const auto& C = t.sy.C;
  for (int n = 0; n <= N; ++n)
    for (int m = 0; m <= N; ++m) {
      // C_{2m} phi_{n,2m+1} = (Omega_{2m} y - 1) phi_{n-1,2m} - C_{2m-1} phi_{n-2,2m-1}
      bool a1 = 2 * m - 1 >= 0 && 2 * m - 1 <= n - 2;
      // C_{2m+1} phi_{n+1,2m+2} = (1 - Omega_{2m+1}/y) phi_{n,2m+1} - C_{2m} phi_{n-1,2m}
      bool a2 = 2 * m <= n - 1 && n + 1 <= N;
      // C_0 phi_{1,1} = (Omega_0 y - 1) phi_{0,0}
      bool a3 = n == 1 && m == 0;
      if (!a1) ++r.not_applicable;
      if (!a2) ++r.not_applicable;
      if (!a3) ++r.not_applicable;
      for (const Point& p : points) {
        if (a1) {
          Real res = C[2 * m] * t.phi(n, 2 * m + 1, p.x, p.y) -
                     ((Om[2 * m] * p.y - 1) * t.phi(n - 1, 2 * m, p.x, p.y) -
                      C[2 * m - 1] * t.phi(n - 2, 2 * m - 1, p.x, p.y));
          r.max_residual[0] = std::max(r.max_residual[0], rabs(res));
        }
        if (a2) {
          Real res = C[2 * m + 1] * t.phi(n + 1, 2 * m + 2, p.x, p.y) -
                     ((1 - Om[2 * m + 1] / p.y) * t.phi(n, 2 * m + 1, p.x, p.y) -
                      C[2 * m] * t.phi(n - 1, 2 * m, p.x, p.y));
          r.max_residual[1] = std::max(r.max_residual[1], rabs(res));
        }
        if (a3) {
          Real res = C[0] * t.phi(1, 1, p.x, p.y) - (Om[0] * p.y - 1) * t.phi(0, 0, p.x, p.y);
          r.max_residual[2] = std::max(r.max_residual[2], rabs(res));
        }
      }
      if (a1) ++r.checked[0];
      if (a2) ++r.checked[1];
      if (a3) ++r.checked[2];
    }
  return r;
}

}  // namespace lorpl2
