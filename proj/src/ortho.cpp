#include "lorpl2/ortho.hpp"

#include "lorpl2/error.hpp"

#include <Eigen/Cholesky>
#include <Eigen/SVD>
#include <json.hpp>

#include <cstdio>

namespace lorpl2 {

using ojson = nlohmann::ordered_json;

Mat MomentMatrix::block(int k, int l) const {
  return M.block(level_offset(k), level_offset(l), k + 1, l + 1);
}

MomentMatrix build_moment_matrix(const MomentProvider& p, int n) {
  if (n < 0) throw InvalidArgument("build_moment_matrix: negative level");
  auto mons = lattice_upto(n);
  MomentMatrix mm;
  mm.n = n;
  mm.M = gram(p, mons, mons);
  Eigen::LDLT<Mat> ldlt(mm.M);
  Real det = 1;
  for (Eigen::Index k = 0; k < mm.M.rows(); ++k) det *= ldlt.vectorD()(k);
  mm.det = det;
  return mm;
}

Definiteness check_definiteness(const Mat& M, const Real& tol) {
  Definiteness d;
  if (M.rows() == 0) return d;
  Real maxdiag = 0;
  for (Eigen::Index k = 0; k < M.rows(); ++k) maxdiag = std::max(maxdiag, rabs(M(k, k)));
  if (maxdiag == 0) return d;
  Eigen::LDLT<Mat> ldlt(M);
  Real minp = ldlt.vectorD().minCoeff();
  d.min_pivot_ratio = minp / maxdiag;
  d.positive = d.min_pivot_ratio > tol;
  return d;
}

bool is_positive_definite(const MomentMatrix& m, const Real& tol) {
  return check_definiteness(m.M, tol).positive;
}

namespace {

void check_off_axis(const Real& x, const Real& y) {
  if (x == 0 || y == 0) throw AxisEvaluation();
}

Real ipow(const Real& x, int e) {
  Real r = 1, b = e < 0 ? Real(1 / x) : x;
  for (int k = std::abs(e); k > 0; k >>= 1) {
    if (k & 1) r *= b;
    b *= b;
  }
  return r;
}

}  // namespace

Vec evaluate_monomial_vector(int n, const Real& x, const Real& y) {
  check_off_axis(x, y);
  Vec v(n + 1);
  for (int t = 0; t <= n; ++t) {
    MonomialIndex m = at_level(n, t);
    v(t) = ipow(x, m.i) * ipow(y, m.j);
  }
  return v;
}

Vec derivative_monomial_vector(int n, const Real& x, const Real& y, int axis) {
  check_off_axis(x, y);
  if (axis != 1 && axis != 2) throw InvalidArgument("axis must be 1 or 2");
  Vec v(n + 1);
  for (int t = 0; t <= n; ++t) {
    MonomialIndex m = at_level(n, t);
    if (axis == 1)
      v(t) = m.i == 0 ? Real(0) : Real(m.i) * ipow(x, m.i - 1) * ipow(y, m.j);
    else
      v(t) = m.j == 0 ? Real(0) : Real(m.j) * ipow(x, m.i) * ipow(y, m.j - 1);
  }
  return v;
}

OrthoSystem::OrthoSystem(Mat coefficients, int max_level, ProviderPtr provider,
                         Real min_pivot_ratio)
    : C_(std::move(coefficients)),
      N_(max_level),
      provider_(std::move(provider)),
      min_pivot_ratio_(min_pivot_ratio) {
  if (C_.rows() != dim_L(N_) || C_.cols() != dim_L(N_))
    throw InvalidArgument("OrthoSystem: coefficient matrix has the wrong size");
}

Mat OrthoSystem::block(int n, int i) const {
  if (n < 0 || n > N_ || i < 0 || i > N_)
    throw InvalidArgument("OrthoSystem::block: level outside 0.." + std::to_string(N_));
  return C_.block(level_offset(n), level_offset(i), n + 1, i + 1);
}

Mat OrthoSystem::level_rows(int n) const {
  if (n < 0 || n > N_) throw InvalidArgument("OrthoSystem: level outside range");
  return C_.block(level_offset(n), 0, n + 1, dim_L(n));
}

Real OrthoSystem::leading_condition(int n) const {
  Eigen::JacobiSVD<Mat> svd(block(n, n));
  const Vec& s = svd.singularValues();
  return s(0) / s(s.size() - 1);
}

Vec OrthoSystem::evaluate_phi(int n, const Real& x, const Real& y) const {
  Vec mons(dim_L(n));
  for (int k = 0; k <= n; ++k) mons.segment(level_offset(k), k + 1) = evaluate_monomial_vector(k, x, y);
  return level_rows(n) * mons;
}

Vec OrthoSystem::derivative_phi(int n, const Real& x, const Real& y, int axis) const {
  Vec mons(dim_L(n));
  for (int k = 0; k <= n; ++k)
    mons.segment(level_offset(k), k + 1) = derivative_monomial_vector(k, x, y, axis);
  return level_rows(n) * mons;
}

Vec OrthoSystem::evaluate_upto(int n, const Real& x, const Real& y) const {
  if (n < 0 || n > N_) throw InvalidArgument("OrthoSystem: level outside range");
  Vec mons(dim_L(n));
  for (int k = 0; k <= n; ++k) mons.segment(level_offset(k), k + 1) = evaluate_monomial_vector(k, x, y);
  Mat lower = C_.topLeftCorner(dim_L(n), dim_L(n));
  return lower * mons;
}

OrthoSystem orthonormalize(ProviderPtr provider, int N, const OrthoOptions& opts) {
  if (!provider) throw InvalidArgument("orthonormalize: null provider");
  if (N < 0) throw InvalidArgument("orthonormalize: negative level");
  MomentMatrix mm = build_moment_matrix(*provider, N);
  const Eigen::Index D = mm.M.rows();
  Real maxdiag = 0;
  for (Eigen::Index k = 0; k < D; ++k) maxdiag = std::max(maxdiag, rabs(mm.M(k, k)));

  // Plain (unpivoted) Cholesky keeps the global order, so C = L^{-1} is
  // block lower triangular and every leading block is lower triangular.
  Mat L = Mat::Zero(D, D);
  Real minratio = std::numeric_limits<Real>::max();
  for (Eigen::Index k = 0; k < D; ++k) {
    Real d = mm.M(k, k);
    for (Eigen::Index r = 0; r < k; ++r) d -= L(k, r) * L(k, r);
    Real ratio = d / maxdiag;
    minratio = std::min(minratio, ratio);
    if (!(ratio > Real(opts.min_pivot_ratio))) {
      int lev = level(from_global(k));
      throw NotPositiveDefinite("moment matrix not positive definite at level " +
                                    std::to_string(lev) + " (pivot ratio " +
                                    to_decimal(ratio, 3) + ", threshold " +
                                    to_decimal(Real(opts.min_pivot_ratio), 3) + ")",
                                lev);
    }
    L(k, k) = boost::multiprecision::sqrt(d);
    for (Eigen::Index i = k + 1; i < D; ++i) {
      Real s = mm.M(i, k);
      for (Eigen::Index r = 0; r < k; ++r) s -= L(i, r) * L(k, r);
      L(i, k) = s / L(k, k);
    }
  }
  Mat C = L.triangularView<Eigen::Lower>().solve(Mat::Identity(D, D));
  return OrthoSystem(std::move(C), N, std::move(provider), minratio);
}

Mat system_gram(const OrthoSystem& s, int n, int m) {
  Mat G = gram(*s.provider(), lattice_upto(n), lattice_upto(m));
  return s.level_rows(n) * G * s.level_rows(m).transpose();
}

Real orthonormality_defect(const OrthoSystem& s, int upto) {
  auto mons = lattice_upto(upto);
  Mat G = gram(*s.provider(), mons, mons);
  Mat C = s.coefficients().topLeftCorner(dim_L(upto), dim_L(upto));
  Mat E = C * G * C.transpose() - Mat::Identity(C.rows(), C.rows());
  return max_abs(E);
}

namespace {

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace

std::string ortho_to_json(const OrthoSystem& s) {
  ojson doc;
  doc["format"] = "lorpl2-ortho-v1";
  doc["levels"] = s.max_level();
  int w = window_for_level(s.max_level());
  doc["provider"] = {{"kind", provider_kind_name(s.provider()->kind())},
                     {"description", s.provider()->describe()},
                     {"window", w},
                     {"fingerprint", hex64(fingerprint(*s.provider(), w))}};
  doc["min_pivot_ratio"] = to_decimal(s.min_pivot_ratio(), kReportDigits);
  ojson blocks = ojson::array();
  for (int n = 0; n <= s.max_level(); ++n)
    for (int i = 0; i <= n; ++i) {
      Mat A = s.block(n, i);
      ojson data = ojson::array();
      for (Eigen::Index r = 0; r < A.rows(); ++r)
        for (Eigen::Index c = 0; c < A.cols(); ++c) data.push_back(to_decimal(A(r, c)));
      blocks.push_back({{"n", n}, {"i", i}, {"rows", A.rows()}, {"cols", A.cols()},
                        {"data", std::move(data)}});
    }
  doc["blocks"] = std::move(blocks);
  return doc.dump(1) + "\n";
}

OrthoSystem ortho_from_json(const std::string& text, ProviderPtr provider) {
  ojson doc;
  try {
    doc = ojson::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("ortho system is not valid JSON: ") + e.what());
  }
  if (doc.value("format", "") != "lorpl2-ortho-v1")
    throw SchemaError("ortho system: format must be \"lorpl2-ortho-v1\"");
  int N = doc.at("levels").get<int>();
  if (N < 0) throw SchemaError("ortho system: negative levels");
  int w = window_for_level(N);
  std::string fp = doc.at("provider").at("fingerprint").get<std::string>();
  if (fp != hex64(fingerprint(*provider, w)))
    throw SchemaError("ortho system: provider fingerprint mismatch");
  Mat C = Mat::Zero(dim_L(N), dim_L(N));
  for (const auto& b : doc.at("blocks")) {
    int n = b.at("n").get<int>(), i = b.at("i").get<int>();
    if (n < 0 || n > N || i < 0 || i > n) throw SchemaError("ortho system: bad block index");
    const auto& data = b.at("data");
    if (data.size() != std::size_t((n + 1) * (i + 1)))
      throw SchemaError("ortho system: block size mismatch");
    for (int r = 0; r <= n; ++r)
      for (int c = 0; c <= i; ++c)
        C(level_offset(n) + r, level_offset(i) + c) =
            parse_real(data[r * (i + 1) + c].get<std::string>());
  }
  Real ratio = parse_real(doc.value("min_pivot_ratio", std::string("0")));
  return OrthoSystem(std::move(C), N, std::move(provider), ratio);
}

}  // namespace lorpl2
