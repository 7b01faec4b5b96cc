#include "lorpl2/kernels.hpp"

#include "lorpl2/error.hpp"

#include <set>

namespace lorpl2 {

KernelEvaluator::KernelEvaluator(OrthoSystem system, RecurrenceData data)
    : system_(std::move(system)), data_(std::move(data)) {
  if (data_.N != system_.max_level())
    throw InvalidArgument("KernelEvaluator: recurrence data and system disagree on levels");
}

Real KernelEvaluator::kernel(int n, const Real& x1, const Real& y1, const Real& x2,
                             const Real& y2) const {
  if (n < 0 || n > max_level()) throw InvalidArgument("kernel: level outside range");
  Vec a = system_.evaluate_upto(n, x1, y1);
  Vec b = system_.evaluate_upto(n, x2, y2);
  return a.dot(b);
}

namespace {

// u^T D^{(k)T}_{s} v(p2) - w^T D^{(k)}_{s} z, the common shape of Lambda and Omega.
Real boundary(const Mat& D, const Vec& phis_1, const Vec& phik_2, const Vec& phik_1,
              const Vec& phis_2) {
  return phis_1.dot(D.transpose() * phik_2) - phik_1.dot(D * phis_2);
}

}  // namespace

Real KernelEvaluator::kernel_cd(int n, const Real& x1, const Real& y1, const Real& x2,
                                const Real& y2, int axis) const {
  if (axis != 1 && axis != 2) throw InvalidArgument("axis must be 1 or 2");
  if (n < 0 || n > max_cd_level())
    throw InvalidArgument("kernel_cd: level " + std::to_string(n) + " needs data to level " +
                          std::to_string(n + 2));
  const Real& t1 = axis == 1 ? x1 : y1;
  const Real& t2 = axis == 1 ? x2 : y2;
  if (x1 == 0 || y1 == 0 || x2 == 0 || y2 == 0) throw AxisEvaluation();
  Real u1 = t1 + 1 / t1, u2 = t2 + 1 / t2;
  Real den = u1 - u2;
  if (rabs(den) < Real(kDegeneracyBand) * (1 + rabs(u1)))
    throw DegenerateDenominator(
        "Christoffel-Darboux denominator vanishes (t1 + 1/t1 = t2 + 1/t2); use the confluent form");
  Vec a = system_.evaluate_upto(n + 2, x1, y1);
  Vec b = system_.evaluate_upto(n + 2, x2, y2);
  auto seg = [](const Vec& v, int k) { return Vec(v.segment(level_offset(k), k + 1)); };
  Real num = 0;
  num += boundary(data_.get(n, n + 1, axis), seg(a, n + 1), seg(b, n), seg(a, n), seg(b, n + 1));
  num += boundary(data_.get(n, n + 2, axis), seg(a, n + 2), seg(b, n), seg(a, n), seg(b, n + 2));
  if (n >= 1)
    num += boundary(data_.get(n - 1, n + 1, axis), seg(a, n + 1), seg(b, n - 1), seg(a, n - 1),
                    seg(b, n + 1));
  return num / den;
}

Real KernelEvaluator::kernel_confluent(int n, const Real& x, const Real& y, int axis) const {
  if (axis != 1 && axis != 2) throw InvalidArgument("axis must be 1 or 2");
  if (n < 0 || n > max_cd_level())
    throw InvalidArgument("kernel_confluent: level " + std::to_string(n) +
                          " needs data to level " + std::to_string(n + 2));
  if (x == 0 || y == 0) throw AxisEvaluation();
  const Real& t = axis == 1 ? x : y;
  Real g = t * t - 1;
  if (rabs(g) < Real(kDegeneracyBand))
    throw DegenerateDenominator("confluent form undefined where the axis variable squared is 1");
  std::vector<Vec> v(n + 3), d(n + 3);
  for (int k = 0; k <= n + 2; ++k) {
    v[k] = system_.evaluate_phi(k, x, y);
    d[k] = system_.derivative_phi(k, x, y, axis);
  }
  Real num = 0;
  num += boundary(data_.get(n, n + 1, axis), v[n + 1], d[n], v[n], d[n + 1]);
  num += boundary(data_.get(n, n + 2, axis), v[n + 2], d[n], v[n], d[n + 2]);
  if (n >= 1) num += boundary(data_.get(n - 1, n + 1, axis), v[n + 1], d[n - 1], v[n - 1], d[n + 1]);
  // Limit of the quotient as the second point approaches the first: the
  // difference quotients of the second factors tend to minus the derivative.
  return -t * t / g * num;
}

Vec KernelEvaluator::kernel_coefficients(int n, const Real& x, const Real& y) const {
  if (n < 0 || n > max_level()) throw InvalidArgument("kernel: level outside range");
  Vec vals = system_.evaluate_upto(n, x, y);
  Mat C = system_.coefficients().topLeftCorner(dim_L(n), dim_L(n));
  return C.transpose() * vals;
}

Real evaluate_lattice_poly(const Vec& coeffs, int n, const Real& x, const Real& y) {
  if (coeffs.size() != dim_L(n)) throw InvalidArgument("coefficient vector has the wrong length");
  Real s = 0;
  for (int k = 0; k <= n; ++k) s += coeffs.segment(level_offset(k), k + 1).dot(evaluate_monomial_vector(k, x, y));
  return s;
}

HarrisReport verify_harris(const KernelEvaluator& ev, int p, const std::vector<HarrisNode>& nodes,
                           const std::vector<Real>& weights, const std::vector<Vec>& lagrange,
                           double tol) {
  if (p < 1) throw InvalidArgument("verify_harris: p must be at least 1");
  if (p - 1 > ev.max_level())
    throw InvalidArgument("verify_harris: system does not reach level p-1");
  const std::size_t n = nodes.size();
  if (n == 0 || weights.size() != n || lagrange.size() != n)
    throw InvalidArgument("verify_harris: nodes, weights and Lagrange functions must match in number");
  std::set<std::pair<Real, Real>> seen;
  for (const auto& q : nodes) {
    if (q.x == 0 || q.y == 0) throw AxisEvaluation();
    if (!seen.insert({q.x, q.y}).second) throw InvalidArgument("verify_harris: duplicate nodes");
  }
  for (const Vec& z : lagrange)
    if (z.size() != dim_L(p)) throw InvalidArgument("verify_harris: Lagrange vector must span levels 0..p");

  HarrisReport r;
  const Real T(tol);
  const MomentProvider& mp = *ev.system().provider();

  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      Real v = evaluate_lattice_poly(lagrange[i], p, nodes[j].x, nodes[j].y);
      r.lagrange_error = std::max(r.lagrange_error, rabs(v - Real(i == j ? 1 : 0)));
    }
  r.lagrange_ok = r.lagrange_error <= T;
  if (!r.lagrange_ok) r.failures.push_back("lagrange: zeta_i(x_j, y_j) != delta_ij");

  // Orthogonality to L_{p-1} is tested against its monomial basis.
  Mat G = gram(mp, lattice_upto(p), lattice_upto(p - 1));
  for (std::size_t i = 0; i < n; ++i) {
    Vec eta = lagrange[i];
    eta.head(dim_L(p - 1)) -= weights[i] * ev.kernel_coefficients(p - 1, nodes[i].x, nodes[i].y);
    r.condition_i_error = std::max(r.condition_i_error, max_abs(eta.transpose() * G));
  }
  r.condition_i = r.condition_i_error <= T;
  if (!r.condition_i)
    r.failures.push_back("condition (i): zeta_i - lambda_i K_{p-1}(., x_i) not orthogonal to L_{p-1}");

  auto mons = lattice_upto(p);
  for (std::size_t g = 0; g < mons.size(); ++g) {
    Vec eta = Vec::Zero(dim_L(p));
    eta(g) = 1;
    for (std::size_t i = 0; i < n; ++i) {
      Vec mv = evaluate_monomial_vector(level(mons[g]), nodes[i].x, nodes[i].y);
      eta -= mv(position(mons[g])) * lagrange[i];
    }
    r.condition_ii_error = std::max(r.condition_ii_error, max_abs(eta.transpose() * G));
  }
  r.condition_ii = r.condition_ii_error <= T;
  if (!r.condition_ii)
    r.failures.push_back("condition (ii): interpolation remainder not orthogonal to L_{p-1}");

  if (r.condition_i && r.condition_ii) {
    r.exactness_checked = true;
    auto basis = lattice_upto(2 * p - 1);
    r.exactness_basis_size = int(basis.size());
    for (const MonomialIndex& m : basis) {
      // L(m) as the inner product of the two factors.
      std::pair<MonomialIndex, MonomialIndex> f =
          p >= 2 ? factorize(m, p) : std::make_pair(MonomialIndex{0, 0}, m);
      Real exact = gram(mp, {f.first}, {f.second})(0, 0);
      Real rule = 0;
      for (std::size_t i = 0; i < n; ++i) {
        Vec mv = evaluate_monomial_vector(level(m), nodes[i].x, nodes[i].y);
        rule += weights[i] * mv(position(m));
      }
      r.exactness_error = std::max(r.exactness_error, rabs(rule - exact));
    }
    r.exactness_ok = r.exactness_error <= T;
    if (!r.exactness_ok)
      r.failures.push_back("exactness: rule differs from L on L_{2p-1}");
  }
  r.passed = r.lagrange_ok && r.condition_i && r.condition_ii && r.exactness_ok;
  return r;
}

}  // namespace lorpl2
