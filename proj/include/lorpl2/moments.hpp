#pragma once

#include "lorpl2/lattice.hpp"
#include "lorpl2/quadrature.hpp"
#include "lorpl2/real.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace lorpl2 {

enum class ProviderKind { analytic, product_weight, atomic, table };

std::string provider_kind_name(ProviderKind k);

// Source of mu_{i,j} = L(x^i y^j).
class MomentProvider {
 public:
  virtual ~MomentProvider() = default;

  virtual ProviderKind kind() const = 0;
  // Every (i, j) with |i|, |j| <= window() is available.
  virtual int window() const = 0;
  virtual bool has(int i, int j) const;
  virtual std::string describe() const = 0;

  // Throws WindowExceeded outside the available set.
  Real moment(int i, int j) const;
  Real moment(MonomialIndex m) const { return moment(m.i, m.j); }

 protected:
  virtual Real eval(int i, int j) const = 0;
};

using ProviderPtr = std::shared_ptr<const MomentProvider>;

inline Real moment(const MomentProvider& p, int i, int j) { return p.moment(i, j); }

// Lebesgue measure on [a,b] x [c,d], closed-form moments.
class LebesgueProvider final : public MomentProvider {
 public:
  LebesgueProvider(Real a, Real b, Real c, Real d, int window);
  ProviderKind kind() const override { return ProviderKind::analytic; }
  int window() const override { return window_; }
  std::string describe() const override;

 protected:
  Real eval(int i, int j) const override;

 private:
  int window_;
  std::vector<Real> mx_, my_;
  std::string desc_;
};

// dmu = wx(x) wy(y) dx dy; univariate moments by quadrature at construction.
class ProductWeightProvider final : public MomentProvider {
 public:
  ProductWeightProvider(Weight1D wx, Weight1D wy, int window, const QuadPolicy& policy = {});
  ProviderKind kind() const override { return ProviderKind::product_weight; }
  int window() const override { return window_; }
  std::string describe() const override;

  const Weight1D& wx() const { return wx_; }
  const Weight1D& wy() const { return wy_; }
  // m_k of each factor, k = -window..window.
  Real mx(int k) const { return mx_.at(k + window_); }
  Real my(int k) const { return my_.at(k + window_); }

 protected:
  Real eval(int i, int j) const override;

 private:
  Weight1D wx_, wy_;
  int window_;
  std::vector<Real> mx_, my_;
};

struct Atom {
  Real x, y, w;
};

class AtomicProvider final : public MomentProvider {
 public:
  explicit AtomicProvider(std::vector<Atom> atoms, int window = 64);
  ProviderKind kind() const override { return ProviderKind::atomic; }
  int window() const override { return window_; }
  std::string describe() const override;
  const std::vector<Atom>& atoms() const { return atoms_; }

 protected:
  Real eval(int i, int j) const override;

 private:
  std::vector<Atom> atoms_;
  int window_;
};

// Explicit table. Entries beyond the declared window are kept and served.
class TableProvider final : public MomentProvider {
 public:
  TableProvider(std::map<std::pair<int, int>, Real> entries, int window);
  ProviderKind kind() const override { return ProviderKind::table; }
  int window() const override { return window_; }
  bool has(int i, int j) const override;
  std::string describe() const override;
  const std::map<std::pair<int, int>, Real>& entries() const { return entries_; }

 protected:
  Real eval(int i, int j) const override;

 private:
  std::map<std::pair<int, int>, Real> entries_;
  int window_;
};

// Snapshot of the square window of any provider.
std::shared_ptr<TableProvider> tabulate(const MomentProvider& p, int window);

std::string table_to_json(const MomentProvider& p, int window);
std::shared_ptr<TableProvider> table_from_json(const std::string& text);
void save_table(const MomentProvider& p, const std::string& path, int window = -1);
std::shared_ptr<TableProvider> load_table(const std::string& path);

// FNV-1a over the decimal strings of the square window.
std::uint64_t fingerprint(const MomentProvider& p, int window);

// G[a][b] = L(rows[a] * cols[b]).
Mat gram(const MomentProvider& p, const std::vector<MonomialIndex>& rows,
         const std::vector<MonomialIndex>& cols);

// Largest |exponent| occurring in products of two monomials of level <= n.
int window_for_level(int n);

}  // namespace lorpl2
