// Python bindings. Reals cross the boundary as doubles; the quad-precision
// pipeline stays inside.

#include "lorpl2/error.hpp"
#include "lorpl2/kernels.hpp"
#include "lorpl2/lattice.hpp"
#include "lorpl2/moments.hpp"
#include "lorpl2/ortho.hpp"
#include "lorpl2/recurrence.hpp"
#include "lorpl2/univariate.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace lorpl2;

namespace {

Eigen::MatrixXd to_np(const Mat& m) {
  Eigen::MatrixXd r(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) r(i, j) = to_double(m(i, j));
  return r;
}

Eigen::VectorXd to_np(const Vec& v) {
  Eigen::VectorXd r(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) r(i) = to_double(v(i));
  return r;
}

std::vector<double> to_list(const std::vector<Real>& v) {
  std::vector<double> r;
  for (const auto& x : v) r.push_back(to_double(x));
  return r;
}

py::tuple mono(MonomialIndex m) { return py::make_tuple(m.i, m.j); }
MonomialIndex mono(const std::pair<int, int>& p) { return {p.first, p.second}; }

Weight1D weight(const std::string& kind, double a, double b, double mu, double kappa) {
  Weight1D w;
  w.kind = parse_weight_kind(kind);
  w.a = a;
  w.b = b;
  w.mu = mu;
  w.kappa = kappa;
  return w;
}

std::vector<Point> points(const std::vector<std::pair<double, double>>& pts) {
  std::vector<Point> r;
  for (auto [x, y] : pts) r.push_back({Real(x), Real(y)});
  return r;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Orthonormal Laurent polynomials in two variables";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<InvalidArgument>(m, "InvalidArgument", base.ptr());
  py::register_exception<WindowExceeded>(m, "WindowExceeded", base.ptr());
  py::register_exception<SchemaError>(m, "SchemaError", base.ptr());
  py::register_exception<AxisEvaluation>(m, "AxisEvaluation", base.ptr());
  py::register_exception<HypothesisViolation>(m, "HypothesisViolation", base.ptr());
  auto num = py::register_exception<NumericalError>(m, "NumericalError", base.ptr());
  py::register_exception<NotPositiveDefinite>(m, "NotPositiveDefinite", num.ptr());
  py::register_exception<DegenerateDenominator>(m, "DegenerateDenominator", num.ptr());
  py::register_exception<RankDeficient>(m, "RankDeficient", num.ptr());
  py::register_exception<QuadratureError>(m, "QuadratureError", num.ptr());

  // lattice
  m.def("c_seq", &c_seq, py::arg("n"));
  m.def("inv_c", &inv_c, py::arg("e"));
  m.def("level", [](std::pair<int, int> p) { return level(mono(p)); }, py::arg("monomial"));
  m.def("position", [](std::pair<int, int> p) { return position(mono(p)); }, py::arg("monomial"));
  m.def("global_index", [](std::pair<int, int> p) { return global_index(mono(p)); },
        py::arg("monomial"));
  m.def("from_global", [](std::int64_t g) { return mono(from_global(g)); }, py::arg("g"));
  m.def("level_basis", [](int n) {
    py::list out;
    for (const auto& e : level_basis(n).entries) out.append(mono(e));
    return out;
  }, py::arg("n"));
  m.def("dim_L", &dim_L, py::arg("n"));
  m.def("struct_matrices", [](int n, int axis) {
    py::dict out;
    for (const auto& b : struct_matrices(n, axis)) out[py::int_(b.s)] = Eigen::MatrixXi(b.data);
    return out;
  }, py::arg("n"), py::arg("axis"), "B^{(n)}_{s,axis} keyed by s");
  m.def("factorize", [](std::pair<int, int> p, int k) {
    auto [a, b] = factorize(mono(p), k);
    return py::make_tuple(mono(a), mono(b));
  }, py::arg("monomial"), py::arg("p"));
  m.def("c_additivity_check", &c_additivity_check, py::arg("s"), py::arg("t"));

  // moments
  py::class_<MomentProvider, std::shared_ptr<MomentProvider>>(m, "MomentProvider")
      .def("moment", [](const MomentProvider& p, int i, int j) { return to_double(p.moment(i, j)); },
           py::arg("i"), py::arg("j"))
      .def("moment_str", [](const MomentProvider& p, int i, int j) {
        return to_decimal(p.moment(i, j));
      }, py::arg("i"), py::arg("j"), "the value as an exact decimal string")
      .def_property_readonly("window", &MomentProvider::window)
      .def_property_readonly("kind", [](const MomentProvider& p) { return provider_kind_name(p.kind()); })
      .def("describe", &MomentProvider::describe)
      .def("to_json", [](const MomentProvider& p, int w) { return table_to_json(p, w < 0 ? p.window() : w); },
           py::arg("window") = -1)
      .def("fingerprint", [](const MomentProvider& p) { return fingerprint(p, p.window()); });

  m.def("lebesgue", [](double a, double b, double c, double d, int window) {
    return std::shared_ptr<MomentProvider>(std::make_shared<LebesgueProvider>(a, b, c, d, window));
  }, py::arg("a"), py::arg("b"), py::arg("c"), py::arg("d"), py::arg("window") = 8);
  m.def("product_weight", [](const std::string& kind, double a, double b, double c, double d,
                             int window, double mu, double kappa) {
    return std::shared_ptr<MomentProvider>(std::make_shared<ProductWeightProvider>(
        weight(kind, a, b, mu, kappa), weight(kind, c, d, mu, kappa), window));
  }, py::arg("kind"), py::arg("a"), py::arg("b"), py::arg("c"), py::arg("d"),
     py::arg("window") = 8, py::arg("mu") = 1.0, py::arg("kappa") = 1.0);
  m.def("atomic", [](const std::vector<std::tuple<double, double, double>>& atoms, int window) {
    std::vector<Atom> a;
    for (auto [x, y, w] : atoms) a.push_back({x, y, w});
    return std::shared_ptr<MomentProvider>(std::make_shared<AtomicProvider>(a, window));
  }, py::arg("atoms"), py::arg("window") = 64);
  m.def("table_from_json", [](const std::string& text) {
    return std::shared_ptr<MomentProvider>(table_from_json(text));
  }, py::arg("text"));
  m.def("load_table", [](const std::string& path) {
    return std::shared_ptr<MomentProvider>(load_table(path));
  }, py::arg("path"));
  m.def("save_table", [](const MomentProvider& p, const std::string& path, int w) {
    save_table(p, path, w);
  }, py::arg("provider"), py::arg("path"), py::arg("window") = -1);
  m.def("univariate_moments", [](const std::string& kind, double a, double b, int kmin, int kmax,
                                 double mu, double kappa) {
    return to_list(univariate_moments(weight(kind, a, b, mu, kappa), kmin, kmax));
  }, py::arg("kind"), py::arg("a"), py::arg("b"), py::arg("kmin"), py::arg("kmax"),
     py::arg("mu") = 1.0, py::arg("kappa") = 1.0);
  m.def("window_for_level", &window_for_level, py::arg("n"));

  // ortho
  m.def("moment_matrix", [](const MomentProvider& p, int n) {
    auto mm = build_moment_matrix(p, n);
    return py::make_tuple(to_np(mm.M), to_double(mm.det));
  }, py::arg("provider"), py::arg("n"), "(M_n, det M_n)");
  m.def("monomial_vector", [](int n, double x, double y) {
    return to_np(evaluate_monomial_vector(n, x, y));
  }, py::arg("n"), py::arg("x"), py::arg("y"));

  py::class_<OrthoSystem>(m, "OrthoSystem")
      .def_property_readonly("max_level", &OrthoSystem::max_level)
      .def_property_readonly("min_pivot_ratio",
                             [](const OrthoSystem& s) { return to_double(s.min_pivot_ratio()); })
      .def_property_readonly("provider",
                             [](const OrthoSystem& s) {
                               return std::const_pointer_cast<MomentProvider>(s.provider());
                             })
      .def("block", [](const OrthoSystem& s, int n, int i) { return to_np(s.block(n, i)); },
           py::arg("n"), py::arg("i"))
      .def("evaluate_phi", [](const OrthoSystem& s, int n, double x, double y) {
        return to_np(s.evaluate_phi(n, x, y));
      }, py::arg("n"), py::arg("x"), py::arg("y"))
      .def("derivative_phi", [](const OrthoSystem& s, int n, double x, double y, int axis) {
        return to_np(s.derivative_phi(n, x, y, axis));
      }, py::arg("n"), py::arg("x"), py::arg("y"), py::arg("axis"))
      .def("gram", [](const OrthoSystem& s, int n, int k) { return to_np(system_gram(s, n, k)); },
           py::arg("n"), py::arg("m"))
      .def("orthonormality_defect", [](const OrthoSystem& s) {
        return to_double(orthonormality_defect(s, s.max_level()));
      })
      .def("to_json", &ortho_to_json);

  m.def("orthonormalize", [](std::shared_ptr<MomentProvider> p, int N, double ratio) {
    OrthoOptions o;
    o.min_pivot_ratio = ratio;
    return orthonormalize(p, N, o);
  }, py::arg("provider"), py::arg("N"), py::arg("min_pivot_ratio") = OrthoOptions{}.min_pivot_ratio);

  // recurrence
  py::class_<RecurrenceData>(m, "RecurrenceData")
      .def_readonly("N", &RecurrenceData::N)
      .def("has", &RecurrenceData::has, py::arg("n"), py::arg("s"), py::arg("axis"))
      .def("block", [](const RecurrenceData& d, int n, int s, int axis) {
        return to_np(d.get(n, s, axis));
      }, py::arg("n"), py::arg("s"), py::arg("axis"))
      .def("set_block", [](RecurrenceData& d, int n, int s, int axis, const Eigen::MatrixXd& v) {
        Mat& b = d.at(n, s, axis);
        if (b.rows() != v.rows() || b.cols() != v.cols())
          throw InvalidArgument("set_block: shape mismatch");
        b = v.cast<Real>();
      }, py::arg("n"), py::arg("s"), py::arg("axis"), py::arg("value"))
      .def("operator", [](const RecurrenceData& d, int axis) { return to_np(assemble_operator(d, axis).F); },
           py::arg("axis"))
      .def("to_json", &recurrence_to_json);
  m.def("recurrence_from_json", &recurrence_from_json, py::arg("text"));

  m.def("compute_recurrence", [](const OrthoSystem& s) { return compute_recurrence(s); },
        py::arg("system"));
  m.def("five_term_residual", [](const OrthoSystem& s, const RecurrenceData& d,
                                 const std::vector<std::pair<double, double>>& pts) {
    return to_double(verify_five_term(s, d, points(pts)).max_residual);
  }, py::arg("system"), py::arg("data"), py::arg("points"));
  m.def("check_structure", [](const RecurrenceData& d, const OrthoSystem& s) {
    auto r = check_structure(d, &s);
    py::dict out;
    out["symmetry_error"] = to_double(r.symmetry_error);
    out["upper_rank_margin"] = to_double(r.upper_rank_margin);
    out["lower_rank_margin"] = to_double(r.lower_rank_margin);
    out["stacked_rank_margin"] = to_double(r.stacked_rank_margin);
    out["d10_rank_margin"] = to_double(r.d10_rank_margin);
    out["leading_block_error"] = to_double(r.leading_block_error);
    return out;
  }, py::arg("data"), py::arg("system"));
  m.def("favard_reconstruct", [](const RecurrenceData& d, double rank_tol) {
    FavardOptions o;
    o.rank_tol = rank_tol;
    auto r = favard_reconstruct(d, o);
    return py::make_tuple(r.system, std::shared_ptr<MomentProvider>(r.moments),
                          to_double(r.hankel_defect));
  }, py::arg("data"), py::arg("rank_tol") = 1e-10, "(system, normalized moments, hankel defect)");

  // kernels
  py::class_<KernelEvaluator>(m, "KernelEvaluator")
      .def(py::init<OrthoSystem, RecurrenceData>(), py::arg("system"), py::arg("data"))
      .def_property_readonly("max_level", &KernelEvaluator::max_level)
      .def_property_readonly("max_cd_level", &KernelEvaluator::max_cd_level)
      .def("kernel", [](const KernelEvaluator& e, int n, double x1, double y1, double x2, double y2) {
        return to_double(e.kernel(n, x1, y1, x2, y2));
      }, py::arg("n"), py::arg("x1"), py::arg("y1"), py::arg("x2"), py::arg("y2"))
      .def("kernel_cd", [](const KernelEvaluator& e, int n, double x1, double y1, double x2,
                           double y2, int axis) {
        return to_double(e.kernel_cd(n, x1, y1, x2, y2, axis));
      }, py::arg("n"), py::arg("x1"), py::arg("y1"), py::arg("x2"), py::arg("y2"), py::arg("axis"))
      .def("kernel_confluent", [](const KernelEvaluator& e, int n, double x, double y, int axis) {
        return to_double(e.kernel_confluent(n, x, y, axis));
      }, py::arg("n"), py::arg("x"), py::arg("y"), py::arg("axis"));

  // univariate
  py::class_<UnivariateSystem>(m, "UnivariateSystem")
      .def_readonly("N", &UnivariateSystem::N)
      .def_property_readonly("Omega", [](const UnivariateSystem& s) { return to_list(s.Omega); })
      .def_property_readonly("C", [](const UnivariateSystem& s) { return to_list(s.C); })
      .def("evaluate", [](const UnivariateSystem& s, int n, double x) {
        return to_double(s.evaluate(n, x));
      }, py::arg("n"), py::arg("x"));
  m.def("build_univariate", [](const std::string& kind, double a, double b, int N, double mu,
                               double kappa) {
    return build_univariate(weight(kind, a, b, mu, kappa), N);
  }, py::arg("kind"), py::arg("a"), py::arg("b"), py::arg("N"), py::arg("mu") = 1.0,
     py::arg("kappa") = 1.0);
  m.def("build_univariate_from_moments", [](const std::vector<double>& moments, int kmin, int N) {
    std::vector<Real> r(moments.begin(), moments.end());
    return build_univariate(r, kmin, N);
  }, py::arg("moments"), py::arg("kmin"), py::arg("N"));
  m.def("tensor_system", [](const UnivariateSystem& sx, const UnivariateSystem& sy, int N) {
    return build_tensor(sx, sy, N).system;
  }, py::arg("sx"), py::arg("sy"), py::arg("N"), "the product family as an OrthoSystem");
}
