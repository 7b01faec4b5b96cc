#pragma once

#include "lorpl2/ortho.hpp"
#include "lorpl2/real.hpp"

#include <map>
#include <memory>
#include <string>
#include <tuple>
#include <vector>

namespace lorpl2 {

// Blocks D^{(n)}_{s,i} = <(t + 1/t) varphi_n, varphi_s^T>, t = x (i = 1) or y (i = 2).
struct RecurrenceData {
  int N = -1;
  std::map<std::tuple<int, int, int>, Mat> blocks;  // key (n, s, axis)
  // Coefficient rows of varphi_0..varphi_2 over the monomials of levels 0..2,
  // scaled to the normalized functional (varphi_0 == 1). Favard needs them.
  Mat initial_levels;

  bool has(int n, int s, int axis) const { return blocks.count({n, s, axis}) > 0; }
  const Mat& get(int n, int s, int axis) const;
  Mat& at(int n, int s, int axis) { return blocks.at({n, s, axis}); }
  // [D^{(n)}_{s,1}; D^{(n)}_{s,2}]
  Mat stacked(int n, int s) const;
};

RecurrenceData compute_recurrence(const OrthoSystem& system);
RecurrenceData compute_recurrence(const OrthoSystem& system, const MomentProvider& provider);

struct LevelResidual {
  int level = 0;
  int axis = 1;
  Real max_residual = 0;
};

struct FiveTermReport {
  std::vector<LevelResidual> levels;
  Real max_residual = 0;
};

struct Point {
  Real x, y;
};

// Residual of the five-term relation for n <= upto (default N - 2).
FiveTermReport verify_five_term(const OrthoSystem& system, const RecurrenceData& data,
                                const std::vector<Point>& points, int upto = -1);

struct BandedOperator {
  int axis = 1;
  int N = 0;
  Mat F;  // block pentadiagonal, levels 0..N
  Mat block(int row_level, int col_level) const;
};

BandedOperator assemble_operator(const RecurrenceData& data, int axis);

struct StructureReport {
  Real symmetry_error = 0;  // max |D^{(n)}_s - (D^{(s)}_n)^T|
  // Smallest sigma_min / sigma_max over the rank conditions of each family.
  Real upper_rank_margin = 1;    // D^{(n)}_{n+2,i}, rank n+1
  Real lower_rank_margin = 1;    // D^{(n)}_{n-2,i}, rank n-1
  Real stacked_rank_margin = 1;  // D^{(n)}_{n+2}, rank n+3 (n >= 1)
  Real d10_rank_margin = 1;      // D_1^{(0)}, rank 2
  Real leading_block_error = 0;  // diag(A_n, A_n) B_{n+2} - D_{n+2} A_{n+2}
};

StructureReport check_structure(const RecurrenceData& data, const OrthoSystem* system = nullptr);

// Moore-Penrose left inverse of a full column rank matrix.
Mat left_inverse(const Mat& D, double rank_tol = 1e-10);

struct FavardOptions {
  double rank_tol = 1e-10;
  double symmetry_tol = 1e-10;
};

struct FavardResult {
  OrthoSystem system;
  std::shared_ptr<TableProvider> moments;  // normalized, mu_{0,0} = 1
  // Largest disagreement between Gram entries that share an exponent sum.
  Real hankel_defect = 0;
};

FavardResult favard_reconstruct(const RecurrenceData& data, const FavardOptions& opts = {});

// Re-express blocks computed for `from` in the basis of `to` (same measure):
// D_to = Q_n D_from Q_s^T with Q_n = <varphi^to_n, varphi^from_n^T>.
RecurrenceData change_basis(const RecurrenceData& d, const OrthoSystem& from, const OrthoSystem& to);

// Coefficients of (t + 1/t) * row, row given over the monomials of levels 0..n.
Vec shift_coefficients(const Vec& row, int n, int axis);

std::string recurrence_to_json(const RecurrenceData& d);
RecurrenceData recurrence_from_json(const std::string& text);

}  // namespace lorpl2
