// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include "lorpl2/error.hpp"
#include "lorpl2/kernels.hpp"
#include "lorpl2/lattice.hpp"
#include "lorpl2/univariate.hpp"
#include "oracles.hpp"

#include <Eigen/Dense>

#include <chrono>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>

using namespace lorpl2;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string sci(const Real& v) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << to_double(v);
  return os.str();
}

struct Outcome {
  bool pass = true;
  std::string detail;
  void note(bool ok, const std::string& what) {
    pass = pass && ok;
    if (!detail.empty()) detail += "; ";
    detail += what + (ok ? "" : " [fail]");
  }
};

Weight1D interval(WeightKind k, double a, double b) {
  Weight1D w;
  w.kind = k;
  w.a = a;
  w.b = b;
  return w;
}

Real w2_density(const Real& x, const Real& y) { return 1 / sqrt(x * y); }

struct TestMeasure {
  std::string name;
  ProviderPtr provider;
  oracle::Grid grid;
  Real tol;
  double x0, x1, y0, y1;
};

std::vector<TestMeasure> test_measures() {
  std::vector<TestMeasure> out;
  out.push_back({"lebesgue [1,2]^2", std::make_shared<LebesgueProvider>(1, 2, 1, 2, window_for_level(10)),
                 oracle::product_grid(1, 2, 1, 2, oracle::one), Real(1e-9), 1, 2, 1, 2});
  out.push_back({"w2 x w2 [1,4]^2",
                 std::make_shared<ProductWeightProvider>(interval(WeightKind::w2, 1, 4),
                                                         interval(WeightKind::w2, 1, 4), window_for_level(10)),
                 oracle::product_grid(1, 4, 1, 4, w2_density), Real(1e-9), 1, 4, 1, 4});
  auto atoms = oracle::random_atoms(40, 2024);
  out.push_back({"40 random atoms", std::make_shared<AtomicProvider>(atoms, window_for_level(10)),
                 oracle::atom_grid(atoms), Real(1e-11), 0.5, 2.5, 0.5, 2.5});
  return out;
}

// Largest level at which the measure's moment matrix is still positive definite.
int last_positive_level(const MomentProvider& p, int upto) {
  int last = -1;
  for (int n = 0; n <= upto; ++n) {
    if (!is_positive_definite(build_moment_matrix(p, n), Real(1e-30))) break;
    last = n;
  }
  return last;
}

Outcome lattice_exactness() {
  auto t0 = Clock::now();
  Outcome o;
  auto c = [](int n) { return (n % 2 == 1 ? 1 : -1) * ((n + 1) / 2); };
  // Longhand ordering of levels 0..22.
  std::vector<std::vector<std::pair<int, int>>> lev(23);
  for (int L = 0; L <= 22; ++L)
    for (int k = 0; k <= L; ++k) lev[L].push_back({c(L - k), c(k)});
  long mismatches = 0;
  for (int n = 0; n <= 20; ++n)
    for (int axis = 1; axis <= 2; ++axis) {
      auto B = struct_matrices(n, axis);
      for (int r = 0; r <= n; ++r) {
        auto [i, j] = lev[n][r];
        std::multiset<std::pair<int, int>> want, got;
        if (axis == 1) want = {{i + 1, j}, {i - 1, j}};
        else want = {{i, j + 1}, {i, j - 1}};
        for (const auto& b : B) {
          if (b.s < 0) continue;
          for (int k = 0; k <= b.s; ++k) {
            int v = b.data(r, k);
            if (v != 0 && v != 1) ++mismatches;
            if (v) got.insert(lev[b.s][k]);
          }
        }
        mismatches += got != want;
      }
    }
  o.note(mismatches == 0, "symbolic product mismatches n<=20: " + std::to_string(mismatches));
  int bad_dim = 0;
  for (int n = 0; n <= 40; ++n) bad_dim += lattice_upto(n).size() != std::size_t((n + 1) * (n + 2) / 2);
  o.note(bad_dim == 0, "dim L_n wrong for " + std::to_string(bad_dim) + " of n<=40");
  double t = seconds_since(t0);
  o.note(t < 1, "runtime " + std::to_string(t) + " s (< 1 s)");
  return o;
}

Outcome orthonormality(const std::vector<TestMeasure>& ms) {
  auto t0 = Clock::now();
  Outcome o;
  for (const auto& m : ms) {
    try {
      OrthoSystem s = orthonormalize(m.provider, 8);
      Real d = oracle::gram_defect(s, 8, m.grid);
      o.note(d <= m.tol, m.name + ": Gram defect " + sci(d) + " (tol " + sci(m.tol) + ")");
    } catch (const NotPositiveDefinite& e) {
      int last = last_positive_level(*m.provider, 8);
      std::string more;
      if (last >= 0) {
        OrthoSystem s = orthonormalize(m.provider, last);
        more = ", levels 0.." + std::to_string(last) + " Gram defect " +
               sci(oracle::gram_defect(s, last, m.grid));
      }
      o.note(false, m.name + ": not positive definite at level " + std::to_string(e.level()) +
                        " (dim L_8 = 45)" + more);
    }
  }
  double t = seconds_since(t0);
  o.note(t < 10, "runtime " + std::to_string(t) + " s (< 10 s)");
  return o;
}

Outcome five_term(const std::vector<TestMeasure>& ms) {
  Outcome o;
  for (const auto& m : ms) {
    auto pts = oracle::random_points(200, m.x0, m.x1, m.y0, m.y1, 99);
    try {
      OrthoSystem s = orthonormalize(m.provider, 8);
      auto rep = verify_five_term(s, compute_recurrence(s), pts, 6);
      o.note(rep.max_residual <= Real(1e-8), m.name + ": max residual " + sci(rep.max_residual));
    } catch (const NotPositiveDefinite& e) {
      int last = last_positive_level(*m.provider, 8);
      std::string more;
      if (last >= 2) {
        OrthoSystem s = orthonormalize(m.provider, last);
        auto rep = verify_five_term(s, compute_recurrence(s), pts, last - 2);
        more = ", n <= " + std::to_string(last - 2) + " residual " + sci(rep.max_residual);
      }
      o.note(false, m.name + ": n = 6 needs level 8, not positive definite at level " +
                        std::to_string(e.level()) + more);
    }
  }
  return o;
}

Outcome structure(const std::vector<TestMeasure>& ms) {
  Outcome o;
  for (std::size_t k = 0; k < 2; ++k) {
    const auto& m = ms[k];
    OrthoSystem s = orthonormalize(m.provider, 8);
    RecurrenceData d = compute_recurrence(s);
    Real sym = 0;
    for (const auto& [key, D] : d.blocks) {
      auto [n, t, axis] = key;
      if (d.has(t, n, axis)) sym = std::max(sym, max_abs(D - d.get(t, n, axis).transpose()));
    }
    Real worst = 1;
    for (int n = 0; n <= 6; ++n) {
      for (int axis = 1; axis <= 2; ++axis) {
        Eigen::JacobiSVD<Mat> svd(d.get(n, n + 2, axis));
        Vec sv = svd.singularValues();
        worst = std::min(worst, Real(sv(n) / sv(0)));
      }
      Eigen::JacobiSVD<Mat> svd(d.stacked(n, n + 2));
      Vec sv = svd.singularValues();
      int r = std::min(2 * n + 2, n + 3);
      worst = std::min(worst, Real(sv(r - 1) / sv(0)));
    }
    o.note(sym <= Real(1e-10), m.name + ": symmetry " + sci(sym));
    o.note(worst > Real(1e-8), m.name + ": smallest relative singular value " + sci(worst));
  }
  return o;
}

Outcome kernel_coherence(const TestMeasure& m) {
  Outcome o;
  OrthoSystem s = orthonormalize(m.provider, 8);
  KernelEvaluator ev(s, compute_recurrence(s));
  auto a = oracle::random_points(100, 1, 2, 1, 2, 5), b = oracle::random_points(100, 1, 2, 1, 2, 6);
  Real e1 = 0, e2 = 0, ec = 0;
  for (std::size_t k = 0; k < a.size(); ++k)
    for (int n = 0; n <= 6; ++n) {
      Real d = ev.kernel(n, a[k].x, a[k].y, b[k].x, b[k].y);
      e1 = std::max(e1, rabs(d - ev.kernel_cd(n, a[k].x, a[k].y, b[k].x, b[k].y, 1)));
      e2 = std::max(e2, rabs(d - ev.kernel_cd(n, a[k].x, a[k].y, b[k].x, b[k].y, 2)));
      Real dd = ev.kernel(n, a[k].x, a[k].y, a[k].x, a[k].y);
      ec = std::max(ec, rabs(dd - ev.kernel_confluent(n, a[k].x, a[k].y, 1)));
      ec = std::max(ec, rabs(dd - ev.kernel_confluent(n, a[k].x, a[k].y, 2)));
    }
  o.note(e1 <= Real(1e-8), "CD axis 1 " + sci(e1));
  o.note(e2 <= Real(1e-8), "CD axis 2 " + sci(e2));
  o.note(ec <= Real(1e-7), "confluent vs diagonal " + sci(ec));
  // First order: the error of CD at x + h shrinks tenfold per decade of h.
  Real worst_lo = 1e9, worst_hi = 0;
  for (int n = 1; n <= 6; ++n)
    for (int axis = 1; axis <= 2; ++axis) {
      const Real x = a[n].x, y = a[n].y;
      Real conf = ev.kernel_confluent(n, x, y, axis);
      Real prev = -1;
      for (double h : {1e-3, 1e-4, 1e-5}) {
        Real x2 = axis == 1 ? x + h : x, y2 = axis == 2 ? y + h : y;
        Real e = rabs(ev.kernel_cd(n, x, y, x2, y2, axis) - conf);
        if (prev > 0) {
          worst_lo = std::min(worst_lo, Real(prev / e));
          worst_hi = std::max(worst_hi, Real(prev / e));
        }
        prev = e;
      }
    }
  o.note(worst_lo > 8 && worst_hi < 12,
         "CD limit error ratios per decade in [" + sci(worst_lo) + ", " + sci(worst_hi) + "]");
  return o;
}

Outcome favard(const TestMeasure& m) {
  auto t0 = Clock::now();
  Outcome o;
  OrthoSystem s = orthonormalize(m.provider, 6);
  RecurrenceData d = compute_recurrence(s);
  FavardResult r = favard_reconstruct(d);
  Real mu00 = m.provider->moment(0, 0), em = 0;
  for (const auto& [k, v] : r.moments->entries())
    em = std::max(em, rabs(v - m.provider->moment(k.first, k.second) / mu00));
  o.note(em <= Real(1e-8), "moments " + sci(em) + " over " + std::to_string(r.moments->entries().size()) + " entries");
  Real ek = 0;
  auto a = oracle::random_points(100, 1, 2, 1, 2, 8), b = oracle::random_points(100, 1, 2, 1, 2, 9);
  for (std::size_t k = 0; k < a.size(); ++k) {
    Real k1 = s.evaluate_upto(4, a[k].x, a[k].y).dot(s.evaluate_upto(4, b[k].x, b[k].y));
    Real k2 = r.system.evaluate_upto(4, a[k].x, a[k].y).dot(r.system.evaluate_upto(4, b[k].x, b[k].y));
    ek = std::max(ek, rabs(k1 * mu00 - k2));
  }
  o.note(ek <= Real(1e-8), "K_4 " + sci(ek));
  double t = seconds_since(t0);
  o.note(t < 30, "runtime " + std::to_string(t) + " s (< 30 s)");
  return o;
}

Outcome tensor(const std::vector<TestMeasure>& ms) {
  Outcome o;
  const int N = 6;
  std::vector<Weight1D> ws{interval(WeightKind::lebesgue, 1, 2), interval(WeightKind::w2, 1, 4)};
  for (std::size_t k = 0; k < 2; ++k) {
    const auto& m = ms[k];
    auto u = build_univariate(ws[k], N + 2);
    auto t = build_tensor(u, u, N);
    OrthoSystem s = orthonormalize(m.provider, N);
    RecurrenceData d = compute_recurrence(s);
    KernelEvaluator ev(s, d);
    auto a = oracle::random_points(50, m.x0, m.x1, m.y0, m.y1, 3);
    auto b = oracle::random_points(50, m.x0, m.x1, m.y0, m.y1, 4);
    Real ek = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
      for (int n = 0; n <= N; ++n) {
        Real tk = t.system.evaluate_upto(n, a[i].x, a[i].y).dot(t.system.evaluate_upto(n, b[i].x, b[i].y));
        ek = std::max(ek, rabs(tk - ev.kernel(n, a[i].x, a[i].y, b[i].x, b[i].y)));
      }
    RecurrenceData al = change_basis(d, s, t.system);
    Real eb = 0;
    for (const auto& [key, D] : explicit_f2_blocks(u, N).blocks)
      eb = std::max(eb, max_abs(D - al.get(std::get<0>(key), std::get<1>(key), 2)));
    Real pos = 1e30;
    for (std::size_t n = 0; n < u.Omega.size(); ++n) pos = std::min({pos, u.Omega[n], u.C[n]});
    auto g = gamma_delta_xi(u, N + 1);
    for (std::size_t l = 0; l < g.Gamma.size(); ++l) pos = std::min({pos, g.Gamma[l], g.Xi[l]});
    o.note(ek <= Real(1e-9), m.name + ": kernel " + sci(ek));
    o.note(eb <= Real(1e-9), m.name + ": axis-2 blocks " + sci(eb));
    o.note(pos > 0, m.name + ": min of Omega, C, Gamma, Xi " + sci(pos));
  }
  return o;
}

Outcome univariate_sanity() {
  Outcome o;
  auto u = build_univariate(interval(WeightKind::lebesgue, 1, 2), 2);
  Real eo = rabs(u.Omega[0] - Real(2) / 3), ec = rabs(u.C[0] - 1 / (3 * sqrt(Real(3))));
  o.note(eo < Real(1e-12), "Omega_0 error " + sci(eo));
  o.note(ec < Real(1e-12), "C_0 error " + sci(ec));
  return o;
}

Outcome factorization() {
  auto t0 = Clock::now();
  Outcome o;
  auto c = [](int n) { return (n % 2 == 1 ? 1 : -1) * ((n + 1) / 2); };
  long failures = 0, total = 0;
  for (int p = 2; p <= 6; ++p)
    for (int L = 0; L <= 2 * p - 1; ++L)
      for (int k = 0; k <= L; ++k) {
        MonomialIndex m{c(L - k), c(k)};
        ++total;
        try {
          auto [a, b] = factorize(m, p);
          failures += !(a + b == m && level(a) <= p - 1 && level(b) <= p);
        } catch (const std::exception&) {
          ++failures;
        }
      }
  o.note(failures == 0, std::to_string(failures) + " failures of " + std::to_string(total));
  double t = seconds_since(t0);
  o.note(t < 1, "runtime " + std::to_string(t) + " s (< 1 s)");
  return o;
}

std::vector<Vec> lagrange_basis(int p, const std::vector<HarrisNode>& nodes) {
  auto mons = lattice_upto(p);
  Mat V(nodes.size(), mons.size());
  for (std::size_t r = 0; r < nodes.size(); ++r)
    for (std::size_t k = 0; k < mons.size(); ++k)
      V(r, k) = pow(nodes[r].x, mons[k].i) * pow(nodes[r].y, mons[k].j);
  Mat Z = V.completeOrthogonalDecomposition().pseudoInverse();
  std::vector<Vec> z;
  for (std::size_t i = 0; i < nodes.size(); ++i) z.push_back(Z.col(i));
  return z;
}

Outcome harris() {
  Outcome o;
  std::vector<HarrisNode> nodes{{1, 1}, {2, Real(1.5)}, {Real(1.5), 3}};
  std::vector<Real> w{Real(0.2), Real(0.5), Real(0.3)};
  std::vector<Atom> atoms;
  for (std::size_t i = 0; i < nodes.size(); ++i) atoms.push_back({nodes[i].x, nodes[i].y, w[i]});
  auto prov = std::make_shared<AtomicProvider>(atoms, 8);
  OrthoSystem s = orthonormalize(prov, 1);
  KernelEvaluator ev(s, compute_recurrence(s));
  auto z = lagrange_basis(1, nodes);

  auto r = verify_harris(ev, 1, nodes, w, z);
  o.note(r.passed && r.exactness_checked, "atomic rule passes");

  auto starts = [](const HarrisReport& h, const std::string& prefix) {
    for (const auto& f : h.failures)
      if (f.rfind(prefix, 0) == 0) return true;
    return false;
  };
  auto bad_lag = z;
  bad_lag[0] *= 2;
  auto rl = verify_harris(ev, 1, nodes, w, bad_lag);
  o.note(!rl.passed && starts(rl, "lagrange"), "broken Lagrange property named");

  auto ri = verify_harris(ev, 1, nodes, {Real(0.3), Real(0.4), Real(0.3)}, z);
  o.note(!ri.passed && starts(ri, "condition (i)"), "wrong weights named condition (i)");

  std::mt19937_64 rng(2);
  std::normal_distribution<double> nd;
  std::vector<Vec> rz(3, Vec(3));
  for (auto& v : rz)
    for (auto& x : v) x = nd(rng);
  auto rr = verify_harris(ev, 1, nodes, w, rz);
  o.note(!rr.passed && starts(rr, "condition (i)"), "random zeta named condition (i)");

  std::vector<HarrisNode> two{nodes[0], nodes[1]};
  auto z2 = lagrange_basis(1, two);
  std::vector<Real> lam;
  for (const auto& zi : z2)
    lam.push_back(zi(0) * prov->moment(0, 0) + zi(1) * prov->moment(1, 0) + zi(2) * prov->moment(0, 1));
  auto r2 = verify_harris(ev, 1, two, lam, z2);
  o.note(!r2.passed && r2.condition_i && starts(r2, "condition (ii)"), "short node set named condition (ii)");
  return o;
}

}  // namespace

int main() {
  auto ms = test_measures();
  std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"lattice exactness", lattice_exactness},
      {"orthonormality", [&] { return orthonormality(ms); }},
      {"five-term residuals", [&] { return five_term(ms); }},
      {"structural theorems", [&] { return structure(ms); }},
      {"kernel coherence", [&] { return kernel_coherence(ms[0]); }},
      {"Favard round trip", [&] { return favard(ms[0]); }},
      {"tensor equivalence", [&] { return tensor(ms); }},
      {"univariate sanity", univariate_sanity},
      {"factorization", factorization},
      {"Harris predicate", harris},
  };
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o.note(false, std::string("exception: ") + e.what());
    }
    failed += !o.pass;
    std::cout << "criterion " << k + 1 << ' ' << (o.pass ? "PASS" : "FAIL") << ' ' << criteria[k].first
              << ": " << o.detail << std::endl;
  }
  std::cout << (criteria.size() - failed) << '/' << criteria.size() << " criteria passed" << std::endl;
  return failed ? 1 : 0;
}
