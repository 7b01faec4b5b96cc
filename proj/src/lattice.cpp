#include "lorpl2/lattice.hpp"

#include "lorpl2/error.hpp"

#include <stdexcept>
#include <string>

namespace lorpl2 {

int c_seq(int n) {
  if (n < 0) throw InvalidArgument("c_seq: negative index " + std::to_string(n));
  int h = (n + 1) / 2;
  return (n % 2 == 1) ? h : -h;
}

int inv_c(int e) { return e > 0 ? 2 * e - 1 : -2 * e; }

int level(MonomialIndex m) { return inv_c(m.i) + inv_c(m.j); }
int position(MonomialIndex m) { return inv_c(m.j); }

MonomialIndex at_level(int n, int t) {
  if (n < 0 || t < 0 || t > n)
    throw InvalidArgument("at_level: position " + std::to_string(t) + " outside level " +
                          std::to_string(n));
  return {c_seq(n - t), c_seq(t)};
}

std::int64_t global_index(MonomialIndex m) { return level_offset(level(m)) + position(m); }

MonomialIndex from_global(std::int64_t g) {
  if (g < 0) throw InvalidArgument("from_global: negative index");
  int n = 0;
  while (level_offset(n + 1) <= g) ++n;
  return at_level(n, int(g - level_offset(n)));
}

LevelBasis level_basis(int n) {
  if (n < 0) throw InvalidArgument("level_basis: negative level");
  LevelBasis b;
  b.n = n;
  b.entries.reserve(n + 1);
  for (int t = 0; t <= n; ++t) b.entries.push_back(at_level(n, t));
  return b;
}

std::vector<MonomialIndex> lattice_upto(int n) {
  std::vector<MonomialIndex> out;
  if (n < 0) return out;
  out.reserve(dim_L(n));
  for (int k = 0; k <= n; ++k)
    for (int t = 0; t <= k; ++t) out.push_back(at_level(k, t));
  return out;
}

std::array<MonomialIndex, 2> shift_pair(MonomialIndex m, int axis) {
  if (axis == 1) return {MonomialIndex{m.i + 1, m.j}, MonomialIndex{m.i - 1, m.j}};
  if (axis == 2) return {MonomialIndex{m.i, m.j + 1}, MonomialIndex{m.i, m.j - 1}};
  throw InvalidArgument("axis must be 1 or 2");
}

std::array<StructMatrix, 4> struct_matrices(int n, int axis) {
  if (n < 0) throw InvalidArgument("struct_matrices: negative level");
  if (axis != 1 && axis != 2) throw InvalidArgument("axis must be 1 or 2");
  const int offs[4] = {-2, -1, 1, 2};
  std::array<StructMatrix, 4> out;
  for (int k = 0; k < 4; ++k) {
    int s = n + offs[k];
    out[k].n = n;
    out[k].s = s;
    out[k].axis = axis;
    out[k].data = Eigen::MatrixXi::Zero(n + 1, s >= 0 ? s + 1 : 0);
  }
  // Materialized by multiplying each monomial out, which also covers the
  // small levels where the block formulas degenerate.
  for (int t = 0; t <= n; ++t) {
    for (const MonomialIndex& r : shift_pair(at_level(n, t), axis)) {
      int s = level(r);
      int k;
      if (s - n == -2) k = 0;
      else if (s - n == -1) k = 1;
      else if (s - n == 1) k = 2;
      else if (s - n == 2) k = 3;
      else throw std::logic_error("shift left the five-level band");
      out[k].data(t, position(r)) = 1;
    }
  }
  return out;
}

namespace {

int cc(int k) { return k < 0 ? 0 : c_seq(k); }

bool top_cases(int s, int t, int p, MonomialIndex& a, MonomialIndex& b) {
  if (s == 2 * p - 1) {
    if (p % 2 == 0) {
      int k = p / 2;
      if (t % 2 == 0) {
        int v = t / 2;
        a = {cc(2 * k - 1), 0};
        b = {cc(2 * (k - v) - 1), cc(2 * v)};
      } else {
        int v = (t - 1) / 2;
        a = {cc(2 * k), 0};
        b = {cc(2 * (k - 1 - v)), cc(2 * v + 1)};
      }
    } else {
      int k = (p - 1) / 2;
      if (t % 2 == 0) {
        int v = t / 2;
        a = {cc(2 * k + 1), 0};
        b = {cc(2 * (k - v) - 1), cc(2 * v)};
      } else {
        int v = (t - 1) / 2;
        a = {cc(2 * k), 0};
        b = {cc(2 * (k - v)), cc(2 * v + 1)};
      }
    }
    return true;
  }
  if (s == 2 * p - 2) {
    if (p % 2 == 0) {
      int k = p / 2;
      if (t % 2 == 0) {
        int v = t / 2;
        a = {cc(2 * (k - 1)), 0};
        b = {cc(2 * (k - v)), cc(2 * v)};
      } else {
        int v = (t - 1) / 2;
        a = {cc(2 * k - 3), 0};
        b = {cc(2 * (k - v) - 1), cc(2 * v + 1)};
      }
    } else {
      int k = (p - 1) / 2;
      if (t % 2 == 0) {
        int v = t / 2;
        a = {cc(2 * k), 0};
        b = {cc(2 * (k - v)), cc(2 * v)};
      } else {
        int v = (t - 1) / 2;
        a = {cc(2 * k - 1), 0};
        b = {cc(2 * (k - v) - 1), cc(2 * v + 1)};
      }
    }
    return true;
  }
  return false;
}

std::pair<MonomialIndex, MonomialIndex> exhaustive(MonomialIndex m, int p) {
  for (const MonomialIndex& a : lattice_upto(p - 1)) {
    MonomialIndex b = m - a;
    if (level(b) <= p) return {a, b};
  }
  throw std::logic_error("factorize: no factorization found");
}

}  // namespace

bool factorize_top(MonomialIndex m, int p, std::pair<MonomialIndex, MonomialIndex>& out) {
  int s = level(m);
  int t = position(m);
  bool swapped = false;
  // The lemma treats the first half of each level; the rest follows by x <-> y.
  if (t > s / 2) {
    m = {m.j, m.i};
    t = s - t;
    swapped = true;
  }
  MonomialIndex a, b;
  if (!top_cases(s, t, p, a, b)) return false;
  if (a + b != m) throw std::logic_error("factorize: case split produced a wrong product");
  if (swapped) {
    a = {a.j, a.i};
    b = {b.j, b.i};
  }
  if (level(a) > level(b)) std::swap(a, b);
  out = {a, b};
  return true;
}

std::pair<MonomialIndex, MonomialIndex> factorize(MonomialIndex m, int p) {
  if (p < 2) throw InvalidArgument("factorize: p must be at least 2");
  int s = level(m);
  if (s > 2 * p - 1)
    throw InvalidArgument("factorize: level " + std::to_string(s) + " exceeds 2p-1 = " +
                          std::to_string(2 * p - 1));
  std::pair<MonomialIndex, MonomialIndex> r;
  if (factorize_top(m, p, r)) return r;
  // One induction step down, then plain search.
  if (p - 1 >= 2 && factorize_top(m, p - 1, r)) return r;
  return exhaustive(m, p);
}

bool c_additivity_check(int s, int t) {
  if (s < 0 || t < 0) throw InvalidArgument("c_additivity_check: negative argument");
  if (c_seq(2 * s) + c_seq(2 * t) != c_seq(2 * (s + t))) return false;
  if (s >= 1 && t >= 1) {
    if (c_seq(2 * s - 1) + c_seq(2 * t - 1) != c_seq(2 * (s + t) - 1)) return false;
  }
  if (t >= 1) {
    int lhs = c_seq(2 * s) + c_seq(2 * t - 1);
    int rhs = (t - s > 0) ? c_seq(2 * (t - s) - 1) : c_seq(2 * (s - t));
    if (lhs != rhs) return false;
  }
  return true;
}

}  // namespace lorpl2
