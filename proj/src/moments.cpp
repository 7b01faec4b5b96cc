#include "lorpl2/moments.hpp"

#include "lorpl2/error.hpp"

#include <json.hpp>

#include <boost/multiprecision/float128.hpp>

#include <quadmath.h>

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace lorpl2 {

using ojson = nlohmann::ordered_json;

Real parse_real(const std::string& s) {
  if (s.empty()) throw SchemaError("empty decimal string");
  char* end = nullptr;
  // strtoflt128 accepts exactly the decimal grammar we write.
  __float128 v = strtoflt128(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') throw SchemaError("malformed decimal '" + s + "'");
  return Real(v);
}

std::string provider_kind_name(ProviderKind k) {
  switch (k) {
    case ProviderKind::analytic: return "analytic";
    case ProviderKind::product_weight: return "product-weight";
    case ProviderKind::atomic: return "atomic";
    case ProviderKind::table: return "table";
  }
  return "?";
}

bool MomentProvider::has(int i, int j) const {
  int w = window();
  return std::abs(i) <= w && std::abs(j) <= w;
}

Real MomentProvider::moment(int i, int j) const {
  if (!has(i, j)) throw WindowExceeded(i, j, window());
  return eval(i, j);
}

int window_for_level(int n) { return n <= 0 ? 0 : 2 * ((n + 1) / 2); }

// ---------------------------------------------------------------------------

LebesgueProvider::LebesgueProvider(Real a, Real b, Real c, Real d, int window)
    : window_(window) {
  if (!(a > 0 && b > a && c > 0 && d > c))
    throw InvalidArgument("rectangle must satisfy 0 < a < b and 0 < c < d");
  if (window < 0) throw InvalidArgument("window must be nonnegative");
  for (int k = -window; k <= window; ++k) {
    mx_.push_back(lebesgue_moment(a, b, k));
    my_.push_back(lebesgue_moment(c, d, k));
  }
  desc_ = "lebesgue[" + to_decimal(a, 17) + "," + to_decimal(b, 17) + "]x[" +
          to_decimal(c, 17) + "," + to_decimal(d, 17) + "]";
}

std::string LebesgueProvider::describe() const { return desc_; }

Real LebesgueProvider::eval(int i, int j) const {
  return mx_[i + window_] * my_[j + window_];
}

// ---------------------------------------------------------------------------

ProductWeightProvider::ProductWeightProvider(Weight1D wx, Weight1D wy, int window,
                                             const QuadPolicy& policy)
    : wx_(std::move(wx)), wy_(std::move(wy)), window_(window) {
  if (window < 0) throw InvalidArgument("window must be nonnegative");
  mx_ = univariate_moments(wx_, -window, window, policy);
  my_ = univariate_moments(wy_, -window, window, policy);
}

std::string ProductWeightProvider::describe() const {
  return weight_name(wx_.kind) + "[" + to_decimal(wx_.a, 17) + "," + to_decimal(wx_.b, 17) +
         "]x" + weight_name(wy_.kind) + "[" + to_decimal(wy_.a, 17) + "," +
         to_decimal(wy_.b, 17) + "]";
}

Real ProductWeightProvider::eval(int i, int j) const {
  return mx_[i + window_] * my_[j + window_];
}

// ---------------------------------------------------------------------------

AtomicProvider::AtomicProvider(std::vector<Atom> atoms, int window)
    : atoms_(std::move(atoms)), window_(window) {
  if (atoms_.empty()) throw InvalidArgument("atomic measure needs at least one atom");
  std::set<std::pair<Real, Real>> seen;
  for (const Atom& a : atoms_) {
    if (a.x == 0 || a.y == 0) throw InvalidArgument("atom on a coordinate axis");
    if (!(a.w > 0)) throw InvalidArgument("atom weights must be positive");
    if (!seen.insert({a.x, a.y}).second) throw InvalidArgument("duplicate atom");
  }
}

std::string AtomicProvider::describe() const {
  return "atomic(" + std::to_string(atoms_.size()) + " atoms)";
}

Real AtomicProvider::eval(int i, int j) const {
  using boost::multiprecision::pow;
  Real s = 0;
  for (const Atom& a : atoms_) s += a.w * pow(a.x, i) * pow(a.y, j);
  return s;
}

// ---------------------------------------------------------------------------

TableProvider::TableProvider(std::map<std::pair<int, int>, Real> entries, int window)
    : entries_(std::move(entries)), window_(window) {
  if (window < 0) throw SchemaError("window must be nonnegative");
  for (int i = -window; i <= window; ++i)
    for (int j = -window; j <= window; ++j)
      if (!entries_.count({i, j}))
        throw SchemaError("table is missing entry (" + std::to_string(i) + "," +
                          std::to_string(j) + ") inside window " + std::to_string(window));
}

bool TableProvider::has(int i, int j) const { return entries_.count({i, j}) > 0; }

std::string TableProvider::describe() const {
  return "table(window " + std::to_string(window_) + ", " + std::to_string(entries_.size()) +
         " entries)";
}

Real TableProvider::eval(int i, int j) const { return entries_.at({i, j}); }

std::shared_ptr<TableProvider> tabulate(const MomentProvider& p, int window) {
  std::map<std::pair<int, int>, Real> e;
  for (int i = -window; i <= window; ++i)
    for (int j = -window; j <= window; ++j) e[{i, j}] = p.moment(i, j);
  return std::make_shared<TableProvider>(std::move(e), window);
}

namespace {

std::vector<std::pair<int, int>> table_keys(const MomentProvider& p, int window) {
  std::vector<std::pair<int, int>> keys;
  if (auto* t = dynamic_cast<const TableProvider*>(&p)) {
    for (const auto& kv : t->entries()) keys.push_back(kv.first);
  } else {
    for (int i = -window; i <= window; ++i)
      for (int j = -window; j <= window; ++j) keys.push_back({i, j});
  }
  return keys;
}

}  // namespace

std::string table_to_json(const MomentProvider& p, int window) {
  if (window < 0) window = p.window();
  ojson doc;
  doc["format"] = "lorpl2-moments-v1";
  doc["window"] = window;
  ojson entries = ojson::array();
  for (auto [i, j] : table_keys(p, window)) {
    ojson e;
    e["i"] = i;
    e["j"] = j;
    e["value"] = to_decimal(p.moment(i, j));
    entries.push_back(std::move(e));
  }
  doc["entries"] = std::move(entries);
  return doc.dump(1) + "\n";
}

std::shared_ptr<TableProvider> table_from_json(const std::string& text) {
  ojson doc;
  try {
    doc = ojson::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("moment table is not valid JSON: ") + e.what());
  }
  if (!doc.is_object() || doc.value("format", "") != "lorpl2-moments-v1")
    throw SchemaError("moment table: format must be \"lorpl2-moments-v1\"");
  if (!doc.contains("window") || !doc["window"].is_number_integer())
    throw SchemaError("moment table: integer \"window\" required");
  if (!doc.contains("entries") || !doc["entries"].is_array())
    throw SchemaError("moment table: \"entries\" array required");
  std::map<std::pair<int, int>, Real> e;
  for (const auto& it : doc["entries"]) {
    if (!it.is_object() || !it.contains("i") || !it.contains("j") || !it.contains("value") ||
        !it["i"].is_number_integer() || !it["j"].is_number_integer() ||
        !it["value"].is_string())
      throw SchemaError("moment table: each entry needs integer i, j and string value");
    auto key = std::make_pair(it["i"].get<int>(), it["j"].get<int>());
    if (e.count(key))
      throw SchemaError("moment table: duplicate entry (" + std::to_string(key.first) + "," +
                        std::to_string(key.second) + ")");
    e[key] = parse_real(it["value"].get<std::string>());
  }
  return std::make_shared<TableProvider>(std::move(e), doc["window"].get<int>());
}

void save_table(const MomentProvider& p, const std::string& path, int window) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << table_to_json(p, window);
  if (!out) throw Error("write failed for " + path);
}

std::shared_ptr<TableProvider> load_table(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return table_from_json(ss.str());
}

std::uint64_t fingerprint(const MomentProvider& p, int window) {
  std::uint64_t h = 1469598103934665603ull;
  auto feed = [&h](const std::string& s) {
    for (unsigned char ch : s) {
      h ^= ch;
      h *= 1099511628211ull;
    }
  };
  for (int i = -window; i <= window; ++i)
    for (int j = -window; j <= window; ++j)
      if (p.has(i, j))
        feed(std::to_string(i) + "," + std::to_string(j) + "," + to_decimal(p.moment(i, j)) +
             ";");
  return h;
}

Mat gram(const MomentProvider& p, const std::vector<MonomialIndex>& rows,
         const std::vector<MonomialIndex>& cols) {
  Mat g(rows.size(), cols.size());
  for (std::size_t a = 0; a < rows.size(); ++a)
    for (std::size_t b = 0; b < cols.size(); ++b) g(a, b) = p.moment(rows[a] + cols[b]);
  return g;
}

}  // namespace lorpl2
