#include "lorpl2/quadrature.hpp"

#include "lorpl2/error.hpp"

#include <boost/math/constants/constants.hpp>

#include <cmath>
#include <map>
#include <memory>
#include <mutex>

namespace lorpl2 {

namespace {

template <class T>
void legendre(int n, const T& x, T& p, T& dp) {
  T p0 = 1, p1 = x;
  for (int k = 1; k < n; ++k) {
    T p2 = (T(2 * k + 1) * x * p1 - T(k) * p0) / T(k + 1);
    p0 = p1;
    p1 = p2;
  }
  p = p1;
  dp = T(n) * (x * p1 - p0) / (x * x - T(1));
}

GaussRule build_rule(int n) {
  GaussRule r;
  r.x.resize(n);
  r.w.resize(n);
  const double pi = 3.14159265358979323846;
  for (int i = 0; i < (n + 1) / 2; ++i) {
    // Converge in double first; two quad steps then finish the job.
    double xd = std::cos(pi * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      double p, dp;
      legendre(n, xd, p, dp);
      double dx = p / dp;
      xd -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    Real x = xd, p, dp;
    for (int it = 0; it < 3; ++it) {
      legendre(n, x, p, dp);
      x -= p / dp;
    }
    legendre(n, x, p, dp);
    Real w = Real(2) / ((Real(1) - x * x) * dp * dp);
    r.x[i] = -x;
    r.x[n - 1 - i] = x;
    r.w[i] = w;
    r.w[n - 1 - i] = w;
  }
  if (n % 2 == 1) r.x[n / 2] = 0;
  return r;
}

}  // namespace

const GaussRule& gauss_legendre(int n) {
  if (n < 1) throw InvalidArgument("gauss_legendre: order must be positive");
  static std::mutex mu;
  static std::map<int, std::unique_ptr<GaussRule>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<GaussRule>(build_rule(n));
  return *slot;
}

QuadResult integrate(const std::function<Real(const Real&)>& f, const Real& a, const Real& b,
                     const QuadPolicy& policy) {
  const Real mid = (a + b) / 2, half = (b - a) / 2;
  auto apply = [&](int n) {
    const GaussRule& g = gauss_legendre(n);
    Real s = 0;
    for (int k = 0; k < n; ++k) s += g.w[k] * f(mid + half * g.x[k]);
    return s * half;
  };
  QuadResult res;
  Real prev = apply(policy.start);
  Real gap = 0;
  for (int n = 2 * policy.start; n <= policy.cap; n *= 2) {
    Real cur = apply(n);
    Real scale = std::max(rabs(cur), Real(std::numeric_limits<double>::min()));
    gap = rabs(cur - prev) / scale;
    if (gap <= Real(policy.rel_tol)) {
      res.value = cur;
      res.achieved = gap;
      res.nodes = n;
      return res;
    }
    prev = cur;
  }
  throw QuadratureError("quadrature did not converge within " + std::to_string(policy.cap) +
                            " nodes; achieved relative gap " + to_decimal(gap, 3),
                        to_double(gap));
}

WeightKind parse_weight_kind(const std::string& name) {
  static const std::map<std::string, WeightKind> names = {
      {"lebesgue", WeightKind::lebesgue}, {"w1", WeightKind::w1}, {"w2", WeightKind::w2},
      {"w3", WeightKind::w3},             {"w4", WeightKind::w4}, {"w5", WeightKind::w5},
      {"w6", WeightKind::w6}};
  auto it = names.find(name);
  if (it == names.end()) throw InvalidArgument("unknown weight '" + name + "'");
  return it->second;
}

std::string weight_name(WeightKind k) {
  switch (k) {
    case WeightKind::lebesgue: return "lebesgue";
    case WeightKind::w1: return "w1";
    case WeightKind::w2: return "w2";
    case WeightKind::w3: return "w3";
    case WeightKind::w4: return "w4";
    case WeightKind::w5: return "w5";
    case WeightKind::w6: return "w6";
  }
  return "?";
}

void Weight1D::validate() const {
  if (!(a > 0) || !(b > a))
    throw InvalidArgument("weight interval must satisfy 0 < a < b");
  if (kind == WeightKind::w3 && !(mu > Real(-0.5)))
    throw InvalidArgument("w3 requires mu > -1/2");
  if (kind == WeightKind::w6 && !(kappa > 0)) throw InvalidArgument("w6 requires kappa > 0");
}

bool Weight1D::endpoint_singular() const {
  return kind == WeightKind::w1 || kind == WeightKind::w3 || kind == WeightKind::w4 ||
         kind == WeightKind::w5;
}

Real Weight1D::density(const Real& x) const {
  using boost::multiprecision::exp;
  using boost::multiprecision::log;
  using boost::multiprecision::pow;
  using boost::multiprecision::sqrt;
  const Real g = (b - x) * (x - a);
  switch (kind) {
    case WeightKind::lebesgue: return 1;
    case WeightKind::w1: return 1 / sqrt(g);
    case WeightKind::w2: return 1 / sqrt(x);
    case WeightKind::w3: return pow(g, mu - Real(0.5)) / ((sqrt(b) - sqrt(a)) * pow(x, mu));
    case WeightKind::w4: {
      Real f = 1 + sqrt(a * b) / x;
      return x * f * f / sqrt(g);
    }
    case WeightKind::w5: return 1 / ((x + sqrt(a * b)) * sqrt(g));
    case WeightKind::w6: {
      const Real pi = boost::math::constants::pi<Real>();
      Real l = log(x) / (2 * kappa);
      return (1 + 1 / x) * exp(-l * l) / (2 * kappa * sqrt(pi));
    }
  }
  return 0;
}

Real lebesgue_moment(const Real& a, const Real& b, int k) {
  using boost::multiprecision::log;
  using boost::multiprecision::pow;
  if (k == -1) return log(b / a);
  return (pow(b, k + 1) - pow(a, k + 1)) / Real(k + 1);
}

std::vector<Real> univariate_moments(const Weight1D& w, int kmin, int kmax,
                                     const QuadPolicy& policy) {
  using boost::multiprecision::cos;
  using boost::multiprecision::pow;
  using boost::multiprecision::sin;
  using boost::multiprecision::sqrt;
  w.validate();
  if (kmax < kmin) throw InvalidArgument("univariate_moments: empty range");
  std::vector<Real> out;
  out.reserve(kmax - kmin + 1);
  const Real mid = (w.a + w.b) / 2, half = (w.b - w.a) / 2;
  const Real pi2 = boost::math::constants::half_pi<Real>();
  for (int k = kmin; k <= kmax; ++k) {
    std::function<Real(const Real&)> f;
    Real lo = w.a, hi = w.b;
    if (w.endpoint_singular()) {
      // x = mid + half sin(theta) turns dx / sqrt((b-x)(x-a)) into d(theta).
      lo = -pi2;
      hi = pi2;
      f = [&, k](const Real& th) -> Real {
        Real x = mid + half * sin(th);
        Real hc = half * cos(th);
        Real xk = pow(x, k);
        switch (w.kind) {
          case WeightKind::w1: return xk;
          case WeightKind::w3:
            return xk * pow(hc, 2 * w.mu) / ((sqrt(w.b) - sqrt(w.a)) * pow(x, w.mu));
          case WeightKind::w4: {
            Real g = 1 + sqrt(w.a * w.b) / x;
            return xk * x * g * g;
          }
          case WeightKind::w5: return xk / (x + sqrt(w.a * w.b));
          default: return 0;
        }
      };
    } else {
      f = [&, k](const Real& x) -> Real { return pow(x, k) * w.density(x); };
    }
    out.push_back(integrate(f, lo, hi, policy).value);
  }
  return out;
}

}  // namespace lorpl2
