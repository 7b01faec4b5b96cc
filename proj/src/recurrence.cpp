#include "lorpl2/recurrence.hpp"

#include "lorpl2/error.hpp"

#include <Eigen/SVD>
#include <json.hpp>

namespace lorpl2 {

using ojson = nlohmann::ordered_json;

const Mat& RecurrenceData::get(int n, int s, int axis) const {
  auto it = blocks.find({n, s, axis});
  if (it == blocks.end())
    throw InvalidArgument("recurrence block D^(" + std::to_string(n) + ")_" +
                          std::to_string(s) + "," + std::to_string(axis) + " not available");
  return it->second;
}

Mat RecurrenceData::stacked(int n, int s) const {
  const Mat& a = get(n, s, 1);
  const Mat& b = get(n, s, 2);
  Mat out(a.rows() + b.rows(), a.cols());
  out << a, b;
  return out;
}

Vec shift_coefficients(const Vec& row, int n, int axis) {
  Vec out = Vec::Zero(dim_L(n + 2));
  for (Eigen::Index g = 0; g < row.size(); ++g) {
    if (row(g) == 0) continue;
    for (const MonomialIndex& m : shift_pair(from_global(g), axis)) out(global_index(m)) += row(g);
  }
  return out;
}

namespace {

// Rows of varphi_n times (t + 1/t), over monomials of levels 0..n+2.
Mat shifted_rows(const OrthoSystem& sys, int n, int axis) {
  Mat rows = sys.level_rows(n);
  Mat out(rows.rows(), dim_L(n + 2));
  for (Eigen::Index r = 0; r < rows.rows(); ++r)
    out.row(r) = shift_coefficients(rows.row(r).transpose(), n, axis).transpose();
  return out;
}

Vec singular_values(const Mat& m) {
  Eigen::JacobiSVD<Mat> svd(m);
  return svd.singularValues();
}

// sigma_k / sigma_max (k is 1-based); zero if the matrix has fewer values.
Real sigma_ratio(const Mat& m, int k) {
  Vec s = singular_values(m);
  if (s.size() < k || s(0) == 0) return 0;
  return s(k - 1) / s(0);
}

}  // namespace

RecurrenceData compute_recurrence(const OrthoSystem& system) {
  return compute_recurrence(system, *system.provider());
}

RecurrenceData compute_recurrence(const OrthoSystem& system, const MomentProvider& provider) {
  const int N = system.max_level();
  RecurrenceData d;
  d.N = N;
  // Gram of every monomial reachable after one shift against the basis.
  Mat G = gram(provider, lattice_upto(N + 2), lattice_upto(N));
  Mat C = system.coefficients();
  for (int n = 0; n <= N; ++n)
    for (int axis = 1; axis <= 2; ++axis) {
      Mat P = shifted_rows(system, n, axis);
      Mat Q = P * G.topRows(dim_L(n + 2));
      for (int s = std::max(0, n - 2); s <= std::min(N, n + 2); ++s)
        d.blocks[{n, s, axis}] = Q * C.middleRows(level_offset(s), s + 1).transpose();
    }
  if (N >= 2) {
    Real scale = boost::multiprecision::sqrt(provider.moment(0, 0));
    d.initial_levels = system.coefficients().topLeftCorner(dim_L(2), dim_L(2)) * scale;
  }
  return d;
}

FiveTermReport verify_five_term(const OrthoSystem& system, const RecurrenceData& data,
                                const std::vector<Point>& points, int upto) {
  const int N = system.max_level();
  if (upto < 0) upto = N - 2;
  upto = std::min(upto, N - 2);
  FiveTermReport rep;
  for (int n = 0; n <= upto; ++n)
    for (int axis = 1; axis <= 2; ++axis) rep.levels.push_back({n, axis, Real(0)});
  for (const Point& p : points) {
    Vec all = system.evaluate_upto(N, p.x, p.y);
    std::size_t idx = 0;
    for (int n = 0; n <= upto; ++n) {
      Vec phin = all.segment(level_offset(n), n + 1);
      for (int axis = 1; axis <= 2; ++axis, ++idx) {
        Real t = axis == 1 ? p.x : p.y;
        Vec r = (t + 1 / t) * phin;
        for (int s = std::max(0, n - 2); s <= n + 2; ++s)
          r -= data.get(n, s, axis) * all.segment(level_offset(s), s + 1);
        Real m = r.cwiseAbs().maxCoeff();
        rep.levels[idx].max_residual = std::max(rep.levels[idx].max_residual, m);
        rep.max_residual = std::max(rep.max_residual, m);
      }
    }
  }
  return rep;
}

Mat BandedOperator::block(int row_level, int col_level) const {
  return F.block(level_offset(row_level), level_offset(col_level), row_level + 1, col_level + 1);
}

BandedOperator assemble_operator(const RecurrenceData& data, int axis) {
  if (axis != 1 && axis != 2) throw InvalidArgument("axis must be 1 or 2");
  BandedOperator op;
  op.axis = axis;
  op.N = data.N;
  op.F = Mat::Zero(dim_L(data.N), dim_L(data.N));
  for (int n = 0; n <= data.N; ++n)
    for (int s = std::max(0, n - 2); s <= std::min(data.N, n + 2); ++s)
      op.F.block(level_offset(n), level_offset(s), n + 1, s + 1) = data.get(n, s, axis);
  return op;
}

StructureReport check_structure(const RecurrenceData& data, const OrthoSystem* system) {
  StructureReport r;
  const int N = data.N;
  for (const auto& [key, D] : data.blocks) {
    auto [n, s, axis] = key;
    if (data.has(s, n, axis))
      r.symmetry_error = std::max(r.symmetry_error, max_abs(D - data.get(s, n, axis).transpose()));
  }
  for (int n = 0; n + 2 <= N; ++n) {
    for (int axis = 1; axis <= 2; ++axis) {
      r.upper_rank_margin = std::min(r.upper_rank_margin, sigma_ratio(data.get(n, n + 2, axis), n + 1));
      r.lower_rank_margin =
          std::min(r.lower_rank_margin, sigma_ratio(data.get(n + 2, n, axis), n + 1));
    }
    if (n >= 1)
      r.stacked_rank_margin = std::min(r.stacked_rank_margin, sigma_ratio(data.stacked(n, n + 2), n + 3));
  }
  if (N >= 1) r.d10_rank_margin = sigma_ratio(data.stacked(0, 1), 2);
  if (system) {
    for (int n = 0; n + 2 <= N; ++n) {
      Mat A = system->block(n, n);
      Mat B(2 * (n + 1), n + 3);
      B << struct_matrices(n, 1)[3].data.cast<Real>(), struct_matrices(n, 2)[3].data.cast<Real>();
      Mat lhs = Mat::Zero(2 * (n + 1), 2 * (n + 1));
      lhs.topLeftCorner(n + 1, n + 1) = A;
      lhs.bottomRightCorner(n + 1, n + 1) = A;
      Mat diff = lhs * B - data.stacked(n, n + 2) * system->block(n + 2, n + 2);
      r.leading_block_error = std::max(r.leading_block_error, max_abs(diff));
    }
  }
  return r;
}

Mat left_inverse(const Mat& D, double rank_tol) {
  if (D.rows() < D.cols()) throw RankDeficient("left inverse needs at least as many rows as columns");
  Eigen::JacobiSVD<Mat> svd(D, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vec& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0) throw RankDeficient("left inverse of a zero matrix");
  Real ratio = s(s.size() - 1) / s(0);
  if (!(ratio > Real(rank_tol)))
    throw RankDeficient("matrix is rank deficient (sigma_min/sigma_max = " + to_decimal(ratio, 3) +
                        ")");
  Vec inv = s.cwiseInverse();
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

namespace {

void require_rank(const Mat& m, int rank, double tol, const std::string& name) {
  Real r = sigma_ratio(m, rank);
  if (!(r > Real(tol)))
    throw HypothesisViolation(name, "expected rank " + std::to_string(rank) +
                                        ", sigma ratio " + to_decimal(r, 3) + " below " +
                                        to_decimal(Real(tol), 3));
}

}  // namespace

FavardResult favard_reconstruct(const RecurrenceData& data, const FavardOptions& opts) {
  const int N = data.N;
  if (N < 2) throw InvalidArgument("favard_reconstruct: need recurrence data to level 2 at least");
  if (data.initial_levels.rows() != dim_L(2) || data.initial_levels.cols() != dim_L(2))
    throw InvalidArgument("favard_reconstruct: recurrence data carries no initial levels");

  // Rank hypotheses first: a violated rank also tends to break symmetry, and
  // the rank condition is the more specific diagnosis.
  require_rank(data.stacked(0, 1), 2, opts.rank_tol, "rank D_1^{(0)}");
  for (int n = 0; n + 2 <= N; ++n) {
    for (int axis = 1; axis <= 2; ++axis) {
      std::string ax = std::to_string(axis);
      require_rank(data.get(n, n + 2, axis), n + 1, opts.rank_tol,
                   "rank D_{" + std::to_string(n + 2) + "," + ax + "}^{(" + std::to_string(n) + ")}");
      require_rank(data.get(n + 2, n, axis), n + 1, opts.rank_tol,
                   "rank D_{" + std::to_string(n) + "," + ax + "}^{(" + std::to_string(n + 2) + ")}");
    }
    if (n >= 1)
      require_rank(data.stacked(n, n + 2), n + 3, opts.rank_tol,
                   "rank D_{" + std::to_string(n + 2) + "}^{(" + std::to_string(n) + ")}");
  }
  Real scale = 0;
  for (const auto& kv : data.blocks) scale = std::max(scale, max_abs(kv.second));
  for (const auto& [key, D] : data.blocks) {
    auto [n, s, axis] = key;
    if (s < n && data.has(s, n, axis)) {
      Real e = max_abs(D - data.get(s, n, axis).transpose());
      if (e > Real(opts.symmetry_tol) * (1 + scale))
        throw HypothesisViolation("symmetry D_{" + std::to_string(s) + "," + std::to_string(axis) +
                                      "}^{(" + std::to_string(n) + ")}",
                                  "transpose mismatch " + to_decimal(e, 3));
    }
  }

  const Eigen::Index D = dim_L(N);
  Mat C = Mat::Zero(D, D);
  C.topLeftCorner(dim_L(2), dim_L(2)) = data.initial_levels;
  for (int n = 1; n + 2 <= N; ++n) {
    Mat X = left_inverse(data.stacked(n, n + 2), opts.rank_tol);
    Mat X1 = X.leftCols(n + 1), X2 = X.rightCols(n + 1);
    Mat rows = C.block(level_offset(n), 0, n + 1, D);
    Mat next = Mat::Zero(n + 3, D);
    for (Eigen::Index r = 0; r <= n; ++r) {
      Vec row = rows.row(r).head(dim_L(n)).transpose();
      Vec sx = shift_coefficients(row, n, 1), sy = shift_coefficients(row, n, 2);
      next.leftCols(dim_L(n + 2)) += X1.col(r) * sx.transpose() + X2.col(r) * sy.transpose();
    }
    for (int i = 1; i <= 4; ++i) {
      int s = n + 2 - i;
      if (s < 0) break;
      Mat E = -(X1 * data.get(n, s, 1) + X2 * data.get(n, s, 2));
      next += E * C.block(level_offset(s), 0, s + 1, D);
    }
    C.block(level_offset(n + 2), 0, n + 3, D) = next;
  }

  // L(1) = 1 and L(varphi_n) = 0 make the varphi orthonormal, so the Gram of
  // the monomials is C^{-1} C^{-T}.
  Mat Ci = C.triangularView<Eigen::Lower>().solve(Mat::Identity(D, D));
  Mat M = Ci * Ci.transpose();
  auto mons = lattice_upto(N);
  std::map<std::pair<int, int>, Real> table;
  Real defect = 0;
  for (Eigen::Index a = 0; a < D; ++a)
    for (Eigen::Index b = 0; b < D; ++b) {
      MonomialIndex m = mons[a] + mons[b];
      auto key = std::make_pair(m.i, m.j);
      auto it = table.find(key);
      if (it == table.end())
        table.emplace(key, M(a, b));
      else
        defect = std::max(defect, rabs(it->second - M(a, b)));
    }
  int w = 0;
  while (true) {
    bool full = true;
    for (int i = -(w + 1); i <= w + 1 && full; ++i)
      for (int j = -(w + 1); j <= w + 1 && full; ++j) full = table.count({i, j}) > 0;
    if (!full) break;
    ++w;
  }
  auto provider = std::make_shared<TableProvider>(std::move(table), w);
  FavardResult res{OrthoSystem(std::move(C), N, provider), provider, defect};
  return res;
}

RecurrenceData change_basis(const RecurrenceData& d, const OrthoSystem& from, const OrthoSystem& to) {
  const int N = std::min({d.N, from.max_level(), to.max_level()});
  auto mons = lattice_upto(N);
  Mat G = gram(*to.provider(), mons, mons);
  std::vector<Mat> Q(N + 1);
  for (int n = 0; n <= N; ++n)
    Q[n] = to.level_rows(n) * G.topLeftCorner(dim_L(n), dim_L(n)) * from.level_rows(n).transpose();
  RecurrenceData out;
  out.N = N;
  for (const auto& [key, D] : d.blocks) {
    auto [n, s, axis] = key;
    if (n <= N && s <= N) out.blocks[key] = Q[n] * D * Q[s].transpose();
  }
  return out;
}

namespace {

ojson matrix_json(const Mat& m) {
  ojson data = ojson::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) data.push_back(to_decimal(m(r, c)));
  return ojson{{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

Mat matrix_from(const ojson& j) {
  Eigen::Index rows = j.at("rows").get<Eigen::Index>(), cols = j.at("cols").get<Eigen::Index>();
  const auto& data = j.at("data");
  if (rows < 0 || cols < 0 || data.size() != std::size_t(rows * cols))
    throw SchemaError("matrix size mismatch");
  Mat m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = parse_real(data[r * cols + c].get<std::string>());
  return m;
}

}  // namespace

std::string recurrence_to_json(const RecurrenceData& d) {
  ojson doc;
  doc["format"] = "lorpl2-recurrence-v1";
  doc["levels"] = d.N;
  ojson blocks = ojson::array();
  for (const auto& [key, m] : d.blocks) {
    auto [n, s, axis] = key;
    ojson b = {{"n", n}, {"s", s}, {"axis", axis}};
    ojson mj = matrix_json(m);
    for (auto& [k, v] : mj.items()) b[k] = v;
    blocks.push_back(std::move(b));
  }
  doc["blocks"] = std::move(blocks);
  if (d.initial_levels.size() > 0) doc["initial_levels"] = matrix_json(d.initial_levels);
  return doc.dump(1) + "\n";
}

RecurrenceData recurrence_from_json(const std::string& text) {
  ojson doc;
  try {
    doc = ojson::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("recurrence data is not valid JSON: ") + e.what());
  }
  if (doc.value("format", "") != "lorpl2-recurrence-v1")
    throw SchemaError("recurrence data: format must be \"lorpl2-recurrence-v1\"");
  RecurrenceData d;
  try {
    d.N = doc.at("levels").get<int>();
    for (const auto& b : doc.at("blocks")) {
      int n = b.at("n").get<int>(), s = b.at("s").get<int>(), axis = b.at("axis").get<int>();
      Mat m = matrix_from(b);
      if (m.rows() != n + 1 || m.cols() != s + 1)
        throw SchemaError("recurrence data: block shape disagrees with its levels");
      d.blocks[{n, s, axis}] = std::move(m);
    }
    if (doc.contains("initial_levels")) d.initial_levels = matrix_from(doc["initial_levels"]);
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("recurrence data: ") + e.what());
  }
  return d;
}

}  // namespace lorpl2
