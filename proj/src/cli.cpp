#include "lorpl2/cli.hpp"

#include "lorpl2/error.hpp"
#include "lorpl2/kernels.hpp"
#include "lorpl2/lattice.hpp"
#include "lorpl2/ortho.hpp"
#include "lorpl2/recurrence.hpp"
#include "lorpl2/univariate.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <array>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

namespace lorpl2::cli {

namespace {

using nlohmann::json;

// Top-level JSON object -> CLI11 config items; arrays become repeated values.
class JsonConfig : public CLI::Config {
 public:
  std::string to_config(const CLI::App* app, bool default_also, bool, std::string) const override {
    json j;
    for (const CLI::Option* opt : app->get_options({})) {
      if (opt->get_lnames().empty() || !opt->get_configurable()) continue;
      std::string name = opt->get_lnames()[0];
      if (opt->count() > 0) {
        auto r = opt->results();
        j[name] = r.size() == 1 ? json(r[0]) : json(r);
      } else if (default_also && !opt->get_default_str().empty()) {
        j[name] = opt->get_default_str();
      }
    }
    return j.dump(2);
  }

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    json j;
    try {
      input >> j;
    } catch (const json::exception& e) {
      throw CLI::ConversionError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw CLI::ConversionError("config must be a JSON object");
    std::vector<CLI::ConfigItem> items;
    for (auto it = j.begin(); it != j.end(); ++it) {
      CLI::ConfigItem item;
      item.name = it.key();
      auto scalar = [&](const json& v) -> std::string {
        if (v.is_string()) return v.get<std::string>();
        if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
        if (v.is_number()) return v.dump();
        throw CLI::ConversionError("config value for '" + it.key() + "' must be a scalar or array");
      };
      if (it->is_array())
        for (const json& v : *it) item.inputs.push_back(scalar(v));
      else
        item.inputs.push_back(scalar(*it));
      items.push_back(std::move(item));
    }
    return items;
  }
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write " + path);
  f << text;
  if (!f) throw Error("write failed for " + path);
}

// Numeric rows of a CSV-ish file: separators are commas or blanks, '#' starts a
// comment, a non-numeric first line is taken as a header.
std::vector<std::vector<Real>> read_rows(const std::string& path, std::size_t width) {
  std::istringstream in(read_file(path));
  std::vector<std::vector<Real>> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    std::vector<std::string> f;
    for (std::string t; ls >> t;) f.push_back(t);
    if (f.empty()) continue;
    std::vector<Real> row;
    try {
      for (const auto& t : f) row.push_back(parse_real(t));
    } catch (const SchemaError&) {
      if (rows.empty() && lineno == 1) continue;
      throw InvalidArgument(path + ":" + std::to_string(lineno) + ": not a number");
    }
    if (row.size() != width)
      throw InvalidArgument(path + ":" + std::to_string(lineno) + ": expected " +
                            std::to_string(width) + " columns");
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string fmt(const Real& v) { return to_decimal(v, kReportDigits); }

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
  return q + "\"";
}

std::vector<Real> parse_list(const std::vector<std::string>& v, std::size_t n, const char* what) {
  if (v.size() != n)
    throw InvalidArgument(std::string(what) + " needs " + std::to_string(n) + " values");
  std::vector<Real> r;
  for (const auto& s : v) {
    try {
      r.push_back(parse_real(s));
    } catch (const SchemaError&) {
      throw InvalidArgument(std::string(what) + ": malformed number '" + s + "'");
    }
  }
  return r;
}

QuadPolicy quad_policy(const RunConfig& c) {
  QuadPolicy q;
  q.rel_tol = c.tol_quad;
  return q;
}

int auto_window(const RunConfig& c) {
  return c.window >= 0 ? c.window : window_for_level(c.levels + 2);
}

// Deterministic points inside the sampling box, kept away from the axes.
class PointSource {
 public:
  PointSource(const Measure& m, std::uint64_t seed) : m_(m), rng_(seed) {}

  Point next() {
    using boost::multiprecision::fabs;
    std::uniform_real_distribution<double> u(0.02, 0.98);
    for (;;) {
      Real x = m_.x0 + (m_.x1 - m_.x0) * Real(u(rng_));
      Real y = m_.y0 + (m_.y1 - m_.y0) * Real(u(rng_));
      if (fabs(x) > Real(1e-3) && fabs(y) > Real(1e-3)) return {x, y};
    }
  }

  std::vector<Point> take(int n) {
    std::vector<Point> p;
    for (int k = 0; k < n; ++k) p.push_back(next());
    return p;
  }

 private:
  const Measure& m_;
  std::mt19937_64 rng_;
};

bool degenerate(const Real& t1, const Real& t2) {
  Real u1 = t1 + 1 / t1, u2 = t2 + 1 / t2;
  return rabs(u1 - u2) < Real(kDegeneracyBand) * (1 + rabs(u1));
}

}  // namespace

Measure build_measure(const RunConfig& c, int window) {
  Measure m;
  auto rect = [&] {
    auto r = parse_list(c.rect, 4, "--rect");
    m.x0 = r[0];
    m.x1 = r[1];
    m.y0 = r[2];
    m.y1 = r[3];
    return r;
  };
  if (c.measure == "lebesgue") {
    auto r = rect();
    m.provider = std::make_shared<LebesgueProvider>(r[0], r[1], r[2], r[3], window);
    Weight1D wx, wy;
    wx.a = r[0];
    wx.b = r[1];
    wy.a = r[2];
    wy.b = r[3];
    m.factors = std::make_pair(wx, wy);
  } else if (c.measure == "atomic") {
    if (c.atoms.empty()) throw InvalidArgument("--measure atomic needs --atoms");
    std::vector<Atom> atoms;
    for (auto& row : read_rows(c.atoms, 3)) atoms.push_back({row[0], row[1], row[2]});
    if (atoms.empty()) throw InvalidArgument("atom file " + c.atoms + " is empty");
    m.provider = std::make_shared<AtomicProvider>(atoms, window);
    m.x0 = m.x1 = atoms[0].x;
    m.y0 = m.y1 = atoms[0].y;
    for (const Atom& a : atoms) {
      m.x0 = std::min(m.x0, a.x);
      m.x1 = std::max(m.x1, a.x);
      m.y0 = std::min(m.y0, a.y);
      m.y1 = std::max(m.y1, a.y);
    }
  } else if (c.measure == "table") {
    if (c.table.empty()) throw InvalidArgument("--measure table needs --table");
    rect();
    m.provider = load_table(c.table);
  } else {
    WeightKind kind = parse_weight_kind(c.measure);
    auto r = rect();
    Weight1D wx, wy;
    wx.kind = wy.kind = kind;
    wx.a = r[0];
    wx.b = r[1];
    wy.a = r[2];
    wy.b = r[3];
    wx.mu = wy.mu = parse_list({c.mu}, 1, "--mu")[0];
    wx.kappa = wy.kappa = parse_list({c.kappa}, 1, "--kappa")[0];
    m.provider = std::make_shared<ProductWeightProvider>(wx, wy, window, quad_policy(c));
    m.factors = std::make_pair(wx, wy);
  }
  return m;
}

bool VerificationReport::ok() const {
  return std::none_of(checks.begin(), checks.end(), [](const CheckResult& r) {
    return r.status == "fail" || r.status == "blocked";
  });
}

namespace {

class Reporter {
 public:
  Reporter(const RunConfig& c) : c_(c) {}

  bool enabled(const std::string& name) const {
    std::string module = name.substr(0, name.find('.'));
    return std::find(c_.skip.begin(), c_.skip.end(), module) == c_.skip.end();
  }

  Real tol(double fallback) const { return Real(c_.tol_res > 0 ? c_.tol_res : fallback); }

  // value <= tol passes.
  void upper(const std::string& name, const Real& value, const Real& tol, std::string detail = {}) {
    add({name, value <= tol ? "pass" : "fail", value, tol, std::move(detail)});
  }
  // value > tol passes.
  void lower(const std::string& name, const Real& value, const Real& tol, std::string detail = {}) {
    add({name, value > tol ? "pass" : "fail", value, tol, std::move(detail)});
  }
  void status(const std::string& name, const std::string& st, std::string detail) {
    add({name, st, Real(0), Real(0), std::move(detail)});
  }

  // Runs body, turning library errors into a failed check.
  void guarded(const std::vector<std::string>& names, const std::function<void()>& body) {
    bool any = false;
    for (const auto& n : names) any = any || enabled(n);
    if (!any) return;
    try {
      body();
    } catch (const Error& e) {
      for (const auto& n : names)
        if (!seen_.count(n)) status(n, "fail", e.what());
    }
  }

  VerificationReport finish() {
    std::sort(rep_.checks.begin(), rep_.checks.end(),
              [](const CheckResult& a, const CheckResult& b) { return a.name < b.name; });
    return std::move(rep_);
  }

 private:
  void add(CheckResult r) {
    if (!enabled(r.name) || seen_.count(r.name)) return;
    seen_.insert(r.name);
    rep_.checks.push_back(std::move(r));
  }

  const RunConfig& c_;
  VerificationReport rep_;
  std::set<std::string> seen_;
};

void lattice_checks(Reporter& R) {
  R.guarded({"lattice.additivity"}, [&] {
    int bad = 0;
    for (int s = 0; s <= 12; ++s)
      for (int t = 0; t <= 12; ++t) bad += !c_additivity_check(s, t);
    R.upper("lattice.additivity", Real(bad), Real(0), "failing (s,t) pairs, s,t <= 12");
  });
  R.guarded({"lattice.dimension"}, [&] {
    int bad = 0;
    for (int n = 0; n <= 40; ++n) {
      auto mons = lattice_upto(n);
      std::set<MonomialIndex> uniq(mons.begin(), mons.end());
      if (std::int64_t(uniq.size()) != dim_L(n) || inv_c(c_seq(n)) != n) ++bad;
      for (std::size_t g = 0; g < mons.size(); ++g)
        if (global_index(mons[g]) != std::int64_t(g)) ++bad;
    }
    R.upper("lattice.dimension", Real(bad), Real(0), "mismatching levels, n <= 40");
  });
  R.guarded({"lattice.factorize"}, [&] {
    int bad = 0;
    for (int p = 2; p <= 6; ++p)
      for (const MonomialIndex& m : lattice_upto(2 * p - 1)) {
        auto [a, b] = factorize(m, p);
        if (a + b != m || level(a) > p - 1 || level(b) > p) ++bad;
      }
    R.upper("lattice.factorize", Real(bad), Real(0), "failures, p = 2..6");
  });
  R.guarded({"lattice.struct_matrices"}, [&] {
    int bad = 0;
    for (int n = 0; n <= 20; ++n)
      for (int axis = 1; axis <= 2; ++axis) {
        auto B = struct_matrices(n, axis);
        auto basis = level_basis(n).entries;
        for (int r = 0; r <= n; ++r) {
          auto want = shift_pair(basis[r], axis);
          std::vector<MonomialIndex> expect(want.begin(), want.end()), got;
          for (const StructMatrix& b : B) {
            if (b.s < 0) continue;
            auto cols = level_basis(b.s).entries;
            for (int k = 0; k <= b.s; ++k) {
              int v = b.data(r, k);
              if (v != 0 && v != 1) ++bad;
              if (v == 1) got.push_back(cols[k]);
            }
          }
          std::sort(expect.begin(), expect.end());
          std::sort(got.begin(), got.end());
          if (got != expect) ++bad;
        }
      }
    R.upper("lattice.struct_matrices", Real(bad), Real(0), "mismatching rows, n <= 20");
  });
}

}  // namespace

VerificationReport run_verify(const RunConfig& c) {
  Reporter R(c);
  const int N = c.levels;
  if (N < 0) throw InvalidArgument("--levels must be nonnegative");
  lattice_checks(R);

  const std::vector<std::string> downstream = {
      "ortho.orthonormality",       "recurrence.five_term",      "recurrence.symmetry",
      "recurrence.rank_upper",      "recurrence.rank_lower",     "recurrence.rank_stacked",
      "recurrence.rank_d10",        "recurrence.leading_block",  "recurrence.favard_moments",
      "recurrence.favard_kernel",   "kernels.cd_x",              "kernels.cd_y",
      "kernels.confluent",          "kernels.confluent_limit",   "kernels.diagonal_positive",
      "kernels.symmetry",           "univariate.explicit_blocks", "univariate.lemma",
      "univariate.positivity",      "univariate.tensor_kernel"};

  Measure m = build_measure(c, auto_window(c));
  OrthoSystem sys;
  try {
    sys = orthonormalize(m.provider, N);
    R.lower("ortho.positive_definite", sys.min_pivot_ratio(), Real(OrthoOptions{}.min_pivot_ratio),
            "smallest Cholesky pivot ratio");
  } catch (const NotPositiveDefinite& e) {
    R.status("ortho.positive_definite", "fail", e.what());
    for (const auto& n : downstream) R.status(n, "blocked", "moment matrix not positive definite");
    return R.finish();
  }

  const bool atomic = m.provider->kind() == ProviderKind::atomic;
  PointSource src(m, c.seed);
  const int npts = std::max(1, c.random);
  const std::vector<Point> pts = src.take(npts);

  R.guarded({"ortho.orthonormality"}, [&] {
    R.upper("ortho.orthonormality", orthonormality_defect(sys, N), R.tol(atomic ? 1e-11 : 1e-9),
            "max |<phi_n, phi_m> - delta I|");
  });

  RecurrenceData data;
  try {
    data = compute_recurrence(sys);
  } catch (const Error& e) {
    for (const auto& n : downstream)
      if (n.rfind("ortho.", 0) != 0) R.status(n, "blocked", std::string("recurrence: ") + e.what());
    return R.finish();
  }

  R.guarded({"recurrence.five_term"}, [&] {
    auto ft = verify_five_term(sys, data, pts);
    R.upper("recurrence.five_term", ft.max_residual, R.tol(1e-8), "levels n <= N-2, both axes");
  });
  R.guarded({"recurrence.symmetry", "recurrence.rank_upper", "recurrence.rank_lower",
             "recurrence.rank_stacked", "recurrence.rank_d10", "recurrence.leading_block"},
            [&] {
              auto sr = check_structure(data, &sys);
              Real rt(c.tol_rank);
              R.upper("recurrence.symmetry", sr.symmetry_error, R.tol(1e-10), "");
              R.lower("recurrence.rank_upper", sr.upper_rank_margin, rt, "sigma ratio");
              R.lower("recurrence.rank_lower", sr.lower_rank_margin, rt, "sigma ratio");
              R.lower("recurrence.rank_stacked", sr.stacked_rank_margin, rt, "sigma ratio");
              R.lower("recurrence.rank_d10", sr.d10_rank_margin, rt, "sigma ratio");
              R.upper("recurrence.leading_block", sr.leading_block_error, R.tol(1e-9), "");
            });
  R.guarded({"recurrence.favard_moments", "recurrence.favard_kernel"}, [&] {
    if (N < 2) {
      R.status("recurrence.favard_moments", "skipped", "needs --levels >= 2");
      R.status("recurrence.favard_kernel", "skipped", "needs --levels >= 2");
      return;
    }
    FavardOptions fo;
    fo.rank_tol = c.tol_rank;
    FavardResult fr = favard_reconstruct(data, fo);
    Real mu00 = m.provider->moment(0, 0), err = 0;
    for (const auto& [k, v] : fr.moments->entries())
      if (m.provider->has(k.first, k.second))
        err = std::max(err, rabs(v - m.provider->moment(k.first, k.second) / mu00));
    R.upper("recurrence.favard_moments", err, R.tol(1e-8), "normalized moments");
    int n = std::min(4, N);
    Real kerr = 0;
    for (const Point& p : pts) {
      Real a = sys.evaluate_upto(n, p.x, p.y).squaredNorm() * mu00;
      Real b = fr.system.evaluate_upto(n, p.x, p.y).squaredNorm();
      kerr = std::max(kerr, rabs(a - b));
    }
    R.upper("recurrence.favard_kernel", kerr, R.tol(1e-8), "K_" + std::to_string(n) + " diagonal");
  });

  KernelEvaluator ev(sys, data);
  const int nk = std::min(6, ev.max_cd_level());
  R.guarded({"kernels.cd_x", "kernels.cd_y", "kernels.confluent", "kernels.confluent_limit",
             "kernels.diagonal_positive", "kernels.symmetry"},
            [&] {
              if (nk < 0) {
                for (const char* n : {"kernels.cd_x", "kernels.cd_y", "kernels.confluent",
                                      "kernels.confluent_limit"})
                  R.status(n, "skipped", "needs --levels >= 2");
              }
              Real ecd[2] = {0, 0}, econf = 0, esym = 0, minpos = -1, elim = 0;
              const int npairs = std::min(npts, 100);
              for (int k = 0; k < npairs; ++k) {
                Point p = pts[k], q = src.next();
                for (int n = 0; n <= std::min(6, N); ++n) {
                  Real direct = ev.kernel(n, p.x, p.y, q.x, q.y);
                  esym = std::max(esym, rabs(direct - ev.kernel(n, q.x, q.y, p.x, p.y)));
                  Real diag = ev.kernel(n, p.x, p.y, p.x, p.y);
                  minpos = minpos < 0 ? diag : std::min(minpos, diag);
                  if (n > nk) continue;
                  if (!degenerate(p.x, q.x))
                    ecd[0] = std::max(ecd[0], rabs(direct - ev.kernel_cd(n, p.x, p.y, q.x, q.y, 1)));
                  if (!degenerate(p.y, q.y))
                    ecd[1] = std::max(ecd[1], rabs(direct - ev.kernel_cd(n, p.x, p.y, q.x, q.y, 2)));
                  for (int axis = 1; axis <= 2; ++axis) {
                    Real t = axis == 1 ? p.x : p.y;
                    if (rabs(t * t - 1) < Real(1e-3)) continue;
                    Real conf = ev.kernel_confluent(n, p.x, p.y, axis);
                    econf = std::max(econf, rabs(conf - diag));
                    if (k >= 10) continue;
                    // First order in h: the CD error drops tenfold per decade.
                    Real e[2];
                    for (int j = 0; j < 2; ++j) {
                      Real h = j == 0 ? Real(1e-4) : Real(1e-5);
                      Real x2 = axis == 1 ? p.x + h : p.x, y2 = axis == 2 ? p.y + h : p.y;
                      e[j] = rabs(ev.kernel_cd(n, p.x, p.y, x2, y2, axis) - conf);
                    }
                    if (n > 0) elim = std::max(elim, Real(rabs(log10(e[0] / e[1]) - 1)));
                  }
                }
              }
              R.upper("kernels.cd_x", ecd[0], R.tol(1e-8), "|K_n - CD axis 1|, n <= 6");
              R.upper("kernels.cd_y", ecd[1], R.tol(1e-8), "|K_n - CD axis 2|, n <= 6");
              R.upper("kernels.confluent", econf, R.tol(1e-7), "|K_n(p,p) - confluent|");
              R.upper("kernels.confluent_limit", elim, Real(0.1),
                      "|log10 of CD error ratio, h = 1e-4 vs 1e-5, minus 1|");
              R.lower("kernels.diagonal_positive", minpos, Real(0), "min K_n(p,p)");
              R.upper("kernels.symmetry", esym, R.tol(1e-20), "|K_n(p,q) - K_n(q,p)|");
            });

  const std::vector<std::string> uni = {"univariate.explicit_blocks", "univariate.lemma",
                                        "univariate.positivity", "univariate.tensor_kernel"};
  if (!m.factors) {
    for (const auto& n : uni) R.status(n, "skipped", "measure is not a product");
    return R.finish();
  }
  R.guarded(uni, [&] {
    auto policy = quad_policy(c);
    UnivariateSystem ux = build_univariate(m.factors->first, N + 2, policy);
    UnivariateSystem uy = build_univariate(m.factors->second, N + 2, policy);
    TensorSystem T = build_tensor(ux, uy, N);

    Real pos = 1e300;
    for (const auto* u : {&ux, &uy}) {
      for (std::size_t n = 0; n < u->Omega.size(); ++n) pos = std::min({pos, u->Omega[n], u->C[n]});
      GammaDeltaXi g = gamma_delta_xi(*u, N + 1);
      for (std::size_t l = 0; l < g.Gamma.size(); ++l) pos = std::min({pos, g.Gamma[l], g.Xi[l]});
    }
    R.lower("univariate.positivity", pos, Real(0), "min of Omega, C, Gamma, Xi");

    Real kerr = 0;
    for (const Point& p : pts)
      for (int n = 0; n <= std::min(6, N); ++n) {
        Real a = ev.kernel(n, p.x, p.y, pts.front().x, pts.front().y);
        Real b = T.system.evaluate_upto(n, p.x, p.y).dot(
            T.system.evaluate_upto(n, pts.front().x, pts.front().y));
        kerr = std::max(kerr, rabs(a - b));
      }
    R.upper("univariate.tensor_kernel", kerr, R.tol(1e-9), "tensor vs general K_n, n <= 6");

    RecurrenceData aligned = change_basis(data, sys, T.system);
    RecurrenceData e2 = explicit_f2_blocks(uy, N), e1 = explicit_f1_blocks(ux, N);
    Real berr = 0;
    for (const auto* e : {&e1, &e2})
      for (const auto& [key, D] : e->blocks) {
        auto [n, s, axis] = key;
        berr = std::max(berr, max_abs(D - aligned.get(n, s, axis)));
      }
    R.upper("univariate.explicit_blocks", berr, R.tol(1e-9), "Gamma/Delta/Xi vs aligned blocks");

    LemmaReport lr = lemma_recurrences_check(T, N, pts);
    Real lm = std::max({lr.max_residual[0], lr.max_residual[1], lr.max_residual[2]});
    R.upper("univariate.lemma", lm, R.tol(1e-9),
            std::to_string(lr.checked[0] + lr.checked[1] + lr.checked[2]) + " identities");
  });
  return R.finish();
}

namespace {

int cmd_moments(const RunConfig& c, std::ostream& out) {
  int W = auto_window(c);
  Measure m = build_measure(c, W);
  if (m.provider->kind() == ProviderKind::table) W = std::min(W, m.provider->window());
  write_output(c.out, table_to_json(*m.provider, W), out);
  return 0;
}

int cmd_orthonormalize(const RunConfig& c, std::ostream& out) {
  Measure m = build_measure(c, auto_window(c));
  OrthoSystem s = orthonormalize(m.provider, c.levels);
  write_output(c.out, ortho_to_json(s), out);
  return 0;
}

int cmd_recurrence(const RunConfig& c, std::ostream& out) {
  Measure m = build_measure(c, auto_window(c));
  OrthoSystem s = orthonormalize(m.provider, c.levels);
  RecurrenceData d = compute_recurrence(s);
  if (!c.out.empty()) write_output(c.out, recurrence_to_json(d), out);
  PointSource src(m, c.seed);
  auto rep = verify_five_term(s, d, src.take(std::max(1, c.random)));
  out << "level,axis,max_residual\n";
  for (const auto& l : rep.levels)
    out << l.level << ',' << l.axis << ',' << fmt(l.max_residual) << '\n';
  return 0;
}

int cmd_kernel_eval(const RunConfig& c, std::ostream& out) {
  Measure m = build_measure(c, auto_window(c));
  OrthoSystem s = orthonormalize(m.provider, c.levels);
  KernelEvaluator ev(s, compute_recurrence(s));
  std::vector<std::array<Real, 4>> pairs;
  if (!c.points.empty()) {
    for (auto& r : read_rows(c.points, 4)) pairs.push_back({r[0], r[1], r[2], r[3]});
  } else {
    PointSource src(m, c.seed);
    for (int k = 0; k < std::max(1, c.random); ++k) {
      Point p = src.next(), q = src.next();
      pairs.push_back({p.x, p.y, q.x, q.y});
    }
  }
  const int top = ev.max_cd_level() >= 0 ? ev.max_cd_level() : ev.max_level();
  out << "x1,y1,x2,y2,n,direct,cd_x,cd_y,confluent,flag\n";
  for (const auto& [x1, y1, x2, y2] : pairs) {
    bool dx = degenerate(x1, x2), dy = degenerate(y1, y2);
    std::string flag = x1 == x2 && y1 == y2 ? "diagonal"
                       : dx && dy           ? "degenerate_xy"
                       : dx                 ? "degenerate_x"
                       : dy                 ? "degenerate_y"
                                            : "ok";
    for (int n = 0; n <= top; ++n) {
      bool cd = n <= ev.max_cd_level();
      out << fmt(x1) << ',' << fmt(y1) << ',' << fmt(x2) << ',' << fmt(y2) << ',' << n << ','
          << fmt(ev.kernel(n, x1, y1, x2, y2)) << ',';
      out << (cd && !dx ? fmt(ev.kernel_cd(n, x1, y1, x2, y2, 1)) : "") << ',';
      out << (cd && !dy ? fmt(ev.kernel_cd(n, x1, y1, x2, y2, 2)) : "") << ',';
      // Degenerate rows get the diagonal kernel at the first point.
      std::string conf;
      if (cd && flag != "ok") {
        if (rabs(x1 * x1 - 1) >= Real(kDegeneracyBand))
          conf = fmt(ev.kernel_confluent(n, x1, y1, 1));
        else if (rabs(y1 * y1 - 1) >= Real(kDegeneracyBand))
          conf = fmt(ev.kernel_confluent(n, x1, y1, 2));
      }
      out << conf << ',' << flag << '\n';
    }
  }
  return 0;
}

int cmd_univariate(const RunConfig& c, std::ostream& out) {
  Weight1D w;
  w.kind = parse_weight_kind(c.weight);
  auto iv = parse_list(c.interval, 2, "--interval");
  w.a = iv[0];
  w.b = iv[1];
  w.mu = parse_list({c.mu}, 1, "--mu")[0];
  w.kappa = parse_list({c.kappa}, 1, "--kappa")[0];
  UnivariateSystem u = build_univariate(w, c.levels, quad_policy(c));
  std::ostringstream os;
  os << "n,Omega,C\n";
  for (int n = 0; n < c.levels; ++n) os << n << ',' << fmt(u.Omega[n]) << ',' << fmt(u.C[n]) << '\n';
  write_output(c.out, os.str(), out);
  return 0;
}

int cmd_verify(const RunConfig& c, std::ostream& out) {
  VerificationReport rep = run_verify(c);
  std::ostringstream os;
  os << "check,status,margin,tolerance,detail\n";
  for (const auto& r : rep.checks)
    os << r.name << ',' << r.status << ',' << fmt(r.margin) << ',' << fmt(r.tolerance) << ','
       << csv_field(r.detail) << '\n';
  write_output(c.out, os.str(), out);
  return rep.ok() ? 0 : 1;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Orthonormal Laurent polynomial systems in two variables"};
  app.name("lorpl2");
  app.require_subcommand(1);
  app.fallthrough();
  app.config_formatter(std::make_shared<JsonConfig>());
  app.set_config("--config", "", "JSON file of option values; flags given on the command line win");

  RunConfig c;
  app.add_option("--measure", c.measure, "lebesgue, w1..w6, atomic or table")
      ->check(CLI::IsMember({"lebesgue", "w1", "w2", "w3", "w4", "w5", "w6", "atomic", "table"}))
      ->capture_default_str();
  app.add_option("--rect", c.rect, "a,b,c,d of the rectangle [a,b]x[c,d]")
      ->delimiter(',')
      ->expected(4);
  app.add_option("--atoms", c.atoms, "file of x,y,weight rows");
  app.add_option("--table", c.table, "moment table JSON for --measure table");
  app.add_option("--window", c.window, "moment window (default: what --levels needs)")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--levels", c.levels, "maximum level N")->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  app.add_option("--tol-quad", c.tol_quad, "quadrature relative tolerance")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--tol-rank", c.tol_rank, "relative singular value threshold")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--tol-res", c.tol_res, "replace every residual tolerance of verify")
      ->check(CLI::PositiveNumber);
  app.add_option("--out", c.out, "output file (default stdout)");
  app.add_option("--skip", c.skip, "module whose checks verify omits")
      ->check(CLI::IsMember({"lattice", "ortho", "recurrence", "kernels", "univariate"}));
  app.add_option("--weight", c.weight, "univariate weight: lebesgue, w1..w6")
      ->check(CLI::IsMember({"lebesgue", "w1", "w2", "w3", "w4", "w5", "w6"}))
      ->capture_default_str();
  app.add_option("--interval", c.interval, "a,b of the univariate interval")
      ->delimiter(',')
      ->expected(2);
  app.add_option("--mu", c.mu, "w3 exponent")->capture_default_str();
  app.add_option("--kappa", c.kappa, "w6 scale")->capture_default_str();
  app.add_option("--points", c.points, "file of x1,y1,x2,y2 rows for kernel-eval");
  app.add_option("--random", c.random, "number of random sample points")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--seed", c.seed, "seed of the sample points")->capture_default_str();

  std::function<int(const RunConfig&, std::ostream&)> action;
  auto sub = [&](const char* name, const char* help, int (*fn)(const RunConfig&, std::ostream&)) {
    app.add_subcommand(name, help)->callback([&action, fn] { action = fn; });
  };
  sub("moments", "write the moment table as JSON", cmd_moments);
  sub("orthonormalize", "write the orthonormal system as JSON", cmd_orthonormalize);
  sub("recurrence", "five-term residuals as CSV; blocks as JSON to --out", cmd_recurrence);
  sub("kernel-eval", "kernel values by the direct, Christoffel-Darboux and confluent forms",
      cmd_kernel_eval);
  sub("univariate", "Omega_n, C_n of a one-variable weight as CSV", cmd_univariate);
  sub("verify", "run the invariant checks; exit 1 on any failure", cmd_verify);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e, out, err);
    return rc == 0 ? 0 : 2;
  }
  try {
    return action(c, out);
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const SchemaError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const WindowExceeded& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const AxisEvaluation& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    err << "numerical failure: " << e.what() << '\n';
    return 3;
  }
}

}  // namespace lorpl2::cli
