#pragma once

// Balanced ordering of two-variable Laurent monomials.
//
// The 1D sequence c_n = 0, 1, -1, 2, -2, ... is swept by anti-diagonals:
// level n holds x^{c_{n-t}} y^{c_t} for t = 0..n.

#include <Eigen/Core>

#include <array>
#include <compare>
#include <cstdint>
#include <utility>
#include <vector>

namespace lorpl2 {

struct MonomialIndex {
  int i = 0;  // x exponent
  int j = 0;  // y exponent

  friend auto operator<=>(const MonomialIndex&, const MonomialIndex&) = default;
  MonomialIndex operator+(const MonomialIndex& o) const { return {i + o.i, j + o.j}; }
  MonomialIndex operator-(const MonomialIndex& o) const { return {i - o.i, j - o.j}; }
};

int c_seq(int n);
int inv_c(int e);

int level(MonomialIndex m);
int position(MonomialIndex m);
MonomialIndex at_level(int n, int t);

inline std::int64_t level_offset(int n) { return std::int64_t(n) * (n + 1) / 2; }
inline std::int64_t dim_L(int n) { return std::int64_t(n + 1) * (n + 2) / 2; }

std::int64_t global_index(MonomialIndex m);
MonomialIndex from_global(std::int64_t g);

struct LevelBasis {
  int n = 0;
  std::vector<MonomialIndex> entries;
};

LevelBasis level_basis(int n);

// All monomials of levels 0..n in global order.
std::vector<MonomialIndex> lattice_upto(int n);

struct StructMatrix {
  int n = 0;
  int s = 0;
  int axis = 1;
  Eigen::MatrixXi data;  // (n+1) x (s+1); zero columns when s < 0
};

// B^{(n)}_{s,axis} for s = n-2, n-1, n+1, n+2, in that order.
std::array<StructMatrix, 4> struct_matrices(int n, int axis);

// Monomials of (t + 1/t) * phi_n[pos] with t the axis variable: {t*m, m/t}.
std::array<MonomialIndex, 2> shift_pair(MonomialIndex m, int axis);

// m = m1 * m2 with level(m1) <= p-1 and level(m2) <= p.
std::pair<MonomialIndex, MonomialIndex> factorize(MonomialIndex m, int p);

// The constructive case split for level(m) in {2p-2, 2p-1}; returns false if
// m is not at one of those levels.
bool factorize_top(MonomialIndex m, int p, std::pair<MonomialIndex, MonomialIndex>& out);

bool c_additivity_check(int s, int t);

}  // namespace lorpl2
