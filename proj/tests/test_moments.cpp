#include "lorpl2/error.hpp"
#include "lorpl2/moments.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <Eigen/Dense>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>

using namespace lorpl2;

namespace {

std::string tmp_path(const std::string& name) { return std::string(LORPL2_TEST_TMP) + "/" + name; }

// Double-precision tanh-sinh with the complement argument, so that the
// inverse square roots at the endpoints are resolved accurately.
double ts_moment(WeightKind kind, double a, double b, int k, double mu = 1, double kappa = 1) {
  boost::math::quadrature::tanh_sinh<double> ts;
  auto f = [=](double x, double xc) {
    double g = xc < 0 ? (-xc) * (b - x) : (x - a) * xc;
    double xk = std::pow(x, k);
    switch (kind) {
      case WeightKind::w1: return xk / std::sqrt(g);
      case WeightKind::w2: return xk / std::sqrt(x);
      case WeightKind::w3:
        return xk * std::pow(g, mu - 0.5) / ((std::sqrt(b) - std::sqrt(a)) * std::pow(x, mu));
      case WeightKind::w4: {
        double s = 1 + std::sqrt(a * b) / x;
        return xk * x * s * s / std::sqrt(g);
      }
      case WeightKind::w5: return xk / ((x + std::sqrt(a * b)) * std::sqrt(g));
      case WeightKind::w6: {
        double l = std::log(x) / (2 * kappa);
        return xk * (1 + 1 / x) * std::exp(-l * l) / (2 * kappa * std::sqrt(M_PI));
      }
      default: return xk;
    }
  };
  return ts.integrate(f, a, b);
}

}  // namespace

TEST_SUITE("moments") {

TEST_CASE("Lebesgue moments") {
  LebesgueProvider p(1, 2, 1, 2, 8);
  CHECK(p.moment(0, 0) == 1);
  CHECK(rabs(p.moment(-1, 0) - log(Real(2))) < Real(1e-33));
  CHECK(rabs(p.moment(2, -3) - Real(7) / 3 * Real(3) / 8) < Real(1e-33));
  CHECK_THROWS_AS(p.moment(9, 0), WindowExceeded);
  CHECK_THROWS_AS(LebesgueProvider(0, 2, 1, 2, 4), InvalidArgument);
}

TEST_CASE("atomic moments") {
  AtomicProvider p({{1, 1, Real(0.5)}, {2, 3, Real(0.5)}});
  CHECK(p.moment(1, 1) == Real(3.5));
  CHECK(p.moment(-1, 2) == Real(0.5) + Real(0.5) * 9 / 2);
  CHECK_THROWS_AS(AtomicProvider({{0, 1, 1}}), InvalidArgument);
  CHECK_THROWS_AS(AtomicProvider({{1, 1, 0}}), InvalidArgument);
  CHECK_THROWS_AS(AtomicProvider({{1, 1, 1}, {1, 1, 2}}), InvalidArgument);
}

TEST_CASE("univariate moments, closed forms") {
  Weight1D w;
  auto m = univariate_moments(w, -2, 1);
  CHECK(rabs(m[3] - Real(1.5)) < Real(1e-30));
  CHECK(rabs(m[0] - Real(0.5)) < Real(1e-30));
  Weight1D w2;
  w2.kind = WeightKind::w2;
  w2.a = 1;
  w2.b = 4;
  CHECK(rabs(univariate_moments(w2, 0, 0)[0] - 2) < Real(1e-28));
  Weight1D w1;
  w1.kind = WeightKind::w1;
  w1.a = 1;
  w1.b = 3;
  // Arcsine weight: integral of dx / sqrt((b-x)(x-a)) is pi.
  CHECK(rabs(univariate_moments(w1, 0, 0)[0] - boost::math::constants::pi<Real>()) < Real(1e-28));
}

TEST_CASE("univariate moments against tanh-sinh for every weight") {
  for (WeightKind k : {WeightKind::w1, WeightKind::w2, WeightKind::w3, WeightKind::w4,
                       WeightKind::w5, WeightKind::w6}) {
    for (double mu : {1.0, 1.5}) {
      if (mu != 1.0 && k != WeightKind::w3) continue;
      Weight1D w;
      w.kind = k;
      w.a = 0.5;
      w.b = 3;
      w.mu = mu;
      w.kappa = 0.7;
      auto m = univariate_moments(w, -4, 4);
      for (int j = -4; j <= 4; ++j) {
        double ref = ts_moment(k, 0.5, 3, j, mu, 0.7);
        INFO("weight " << weight_name(k) << " k=" << j);
        CHECK(std::abs(to_double(m[j + 4]) - ref) <= 1e-12 * std::abs(ref));
        CHECK(m[j + 4] > 0);
      }
    }
  }
}

TEST_CASE("weights reject bad parameters") {
  Weight1D w;
  w.a = 2;
  w.b = 1;
  CHECK_THROWS_AS(univariate_moments(w, 0, 1), InvalidArgument);
  w.a = 1;
  w.b = 2;
  w.kind = WeightKind::w3;
  w.mu = -0.6;
  CHECK_THROWS_AS(univariate_moments(w, 0, 1), InvalidArgument);
  CHECK_THROWS_AS(parse_weight_kind("w7"), InvalidArgument);
}

TEST_CASE("quadrature reports non-convergence") {
  QuadPolicy pol;
  pol.cap = 64;
  // A kink in the middle defeats Gauss-Legendre at this cap.
  auto f = [](const Real& x) { return rabs(x - Real(0.3)); };
  CHECK_THROWS_AS(integrate(f, Real(0), Real(1), pol), QuadratureError);
}

TEST_CASE("product provider factorizes") {
  Weight1D wx, wy;
  wx.kind = WeightKind::w5;
  wx.a = 1;
  wx.b = 2;
  wy.kind = WeightKind::w2;
  wy.a = 1;
  wy.b = 4;
  ProductWeightProvider p(wx, wy, 4);
  auto mx = univariate_moments(wx, -4, 4), my = univariate_moments(wy, -4, 4);
  for (int i = -4; i <= 4; ++i)
    for (int j = -4; j <= 4; ++j) CHECK(rabs(p.moment(i, j) - mx[i + 4] * my[j + 4]) < Real(1e-30));
}

TEST_CASE("Gram entries depend only on exponent sums") {
  auto atoms = oracle::random_atoms(12, 5);
  AtomicProvider a(atoms, 10);
  LebesgueProvider l(1, 2, 1, 3, 10);
  auto mons = lattice_upto(6);
  for (const MomentProvider* p : {static_cast<const MomentProvider*>(&a),
                                  static_cast<const MomentProvider*>(&l)}) {
    Mat G = gram(*p, mons, mons);
    for (std::size_t r = 0; r < mons.size(); ++r)
      for (std::size_t c = 0; c < mons.size(); ++c) {
        auto m = mons[r] + mons[c];
        CHECK(G(r, c) == p->moment(m.i, m.j));
      }
  }
}

TEST_CASE("atomic quadratic form is nonnegative and vanishes only on the atoms") {
  auto atoms = oracle::random_atoms(5, 17);
  AtomicProvider p(atoms, 10);
  auto mons = lattice_upto(3);
  Mat G = gram(p, mons, mons);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 50; ++trial) {
    Vec c(mons.size());
    for (auto& v : c) v = nd(rng);
    Real q = c.dot(G * c);
    Real direct = 0;
    for (const auto& at : atoms) {
      Real psi = 0;
      for (std::size_t k = 0; k < mons.size(); ++k)
        psi += c(k) * pow(at.x, mons[k].i) * pow(at.y, mons[k].j);
      direct += at.w * psi * psi;
    }
    CHECK(q >= 0);
    CHECK(rabs(q - direct) <= Real(1e-25) * (1 + direct));
  }
  // A combination vanishing on all five atoms: null vector of the evaluation matrix.
  Mat E(atoms.size(), mons.size());
  for (std::size_t r = 0; r < atoms.size(); ++r)
    for (std::size_t k = 0; k < mons.size(); ++k)
      E(r, k) = pow(atoms[r].x, mons[k].i) * pow(atoms[r].y, mons[k].j);
  Eigen::FullPivLU<Mat> lu(E);
  Vec z = lu.kernel().col(0);
  CHECK(rabs(z.dot(G * z)) < Real(1e-25) * z.squaredNorm());
}

TEST_CASE("tables round-trip exactly") {
  LebesgueProvider p(1, 2, 1, 2, 8);
  std::string path = tmp_path("lebesgue8.json");
  save_table(p, path, 8);
  auto t = load_table(path);
  CHECK(t->window() == 8);
  for (int i = -8; i <= 8; ++i)
    for (int j = -8; j <= 8; ++j) CHECK(t->moment(i, j) == p.moment(i, j));
  CHECK(fingerprint(*t, 8) == fingerprint(p, 8));
  CHECK(table_to_json(*t, 8) == table_to_json(p, 8));
}

TEST_CASE("table schema errors") {
  LebesgueProvider p(1, 2, 1, 2, 4);
  auto j = nlohmann::json::parse(table_to_json(p, 4));
  auto& e = j["entries"];
  for (auto it = e.begin(); it != e.end(); ++it)
    if ((*it)["i"] == -3 && (*it)["j"] == 2) {
      e.erase(it);
      break;
    }
  CHECK_THROWS_AS(table_from_json(j.dump()), SchemaError);
  CHECK_THROWS_AS(table_from_json("{\"format\":\"other\",\"window\":0,\"entries\":[]}"), SchemaError);
  CHECK_THROWS_AS(table_from_json("not json"), SchemaError);

  auto small = tabulate(p, 2);
  CHECK_THROWS_AS(small->moment(3, 0), WindowExceeded);
  CHECK(small->moment(2, -2) == p.moment(2, -2));
}

}  // TEST_SUITE
