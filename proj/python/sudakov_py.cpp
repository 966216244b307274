#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "sudakov/pipeline.hpp"

namespace py = pybind11;
using namespace sudakov;

namespace {

// Python numbers convert exactly (floats are dyadic); strings are decimals or p/q.
Rational to_rational(py::handle h) {
  if (py::isinstance<py::str>(h)) return parse_rational(h.cast<std::string>());
  if (py::isinstance<py::int_>(h)) return parse_rational(py::str(h).cast<std::string>());
  return Rational(h.cast<double>());
}

Vec<Rational> to_vec(py::handle seq) {
  Vec<Rational> v;
  for (auto x : seq) v.push_back(to_rational(x));
  return v;
}

py::object out(const Rational& x) { return py::str(format_rational(x)); }
py::object out(double x) { return py::float_(x); }

template <typename T>
py::list out_vec(const Vec<T>& v) {
  py::list l;
  for (const auto& x : v) l.append(out(x));
  return l;
}

PolyhedralCost<Rational> cost_from(const std::string& cost, int dim) {
  if (is_preset(cost)) return preset_cost<Rational>(cost, dim);
  return parse_cost_text(cost);
}

template <typename T>
py::dict solve_typed(const std::string& cost_name, py::handle mu_pts, py::handle mu_w, py::handle nu_pts,
                     py::handle nu_w) {
  Vec<Vec<T>> xs, ys;
  Vec<T> a, b;
  for (auto p : mu_pts) xs.push_back(convert_vec<T>(to_vec(p)));
  for (auto p : nu_pts) ys.push_back(convert_vec<T>(to_vec(p)));
  for (auto w : mu_w) a.push_back(convert_scalar<T>(to_rational(w)));
  for (auto w : nu_w) b.push_back(convert_scalar<T>(to_rational(w)));
  if (xs.empty()) throw InputError("empty source marginal");
  auto cost = cost_as<T>(cost_from(cost_name, static_cast<int>(xs[0].size())));
  auto inst = make_instance<T>(cost, xs, a, ys, b);
  auto plan = solve_primal(inst);
  py::list entries;
  for (const auto& e : plan.entries) entries.append(py::make_tuple(e.i, e.j, out(e.mass)));
  py::dict d;
  d["value"] = out(plan.value);
  d["entries"] = entries;
  d["phi"] = out_vec(plan.phi);
  d["psi"] = out_vec(plan.psi);
  return d;
}

py::dict result_dict(const RunResult& r) {
  py::dict files;
  for (const auto& [name, text] : r.files) files[py::str(name)] = text;
  py::dict d;
  d["status"] = r.status;
  d["summary"] = r.summary;
  d["files"] = files;
  return d;
}

}  // namespace

PYBIND11_MODULE(_sudakov, m) {
  m.doc() = "Polyhedral-cost optimal transport decompositions";
  py::register_exception<InputError>(m, "InputError", PyExc_ValueError);

  m.def("normalize_problem",
        [](const std::string& text) { return print_problem(parse_problem_text(text)); }, py::arg("text"),
        "Parses a problem file's text and prints it in canonical form.");

  m.def(
      "run",
      [](const std::string& command, const std::string& problem, std::optional<std::string> mode,
         std::optional<std::uint64_t> seed, std::optional<std::string> out_dir, std::optional<int> resolution,
         std::optional<double> slack, std::optional<std::string> witness_radius, bool write) {
        ProblemSpec spec = parse_problem(problem);
        Overrides ov;
        if (mode) {
          if (*mode != "rational" && *mode != "float") throw InputError("mode must be rational or float");
          ov.mode = *mode == "rational" ? Mode::Rational : Mode::Float;
        }
        ov.seed = seed;
        ov.out = out_dir;
        ov.resolution = resolution;
        ov.slack = slack;
        ov.witness_radius = witness_radius;
        apply_overrides(spec, ov);
        RunResult r;
        {
          py::gil_scoped_release release;
          r = run_pipeline(parse_command(command), spec);
          if (write) write_outputs(r, spec.out);
        }
        return result_dict(r);
      },
      py::arg("command"), py::arg("problem"), py::arg("mode") = py::none(), py::arg("seed") = py::none(),
      py::arg("out") = py::none(), py::arg("resolution") = py::none(), py::arg("slack") = py::none(),
      py::arg("witness_radius") = py::none(), py::arg("write") = false,
      "Runs a pipeline command on a problem file. Returns status, summary and the report files.");

  m.def(
      "solve",
      [](py::handle mu_points, py::handle mu_weights, py::handle nu_points, py::handle nu_weights,
         const std::string& cost, bool exact) {
        return exact ? solve_typed<Rational>(cost, mu_points, mu_weights, nu_points, nu_weights)
                     : solve_typed<double>(cost, mu_points, mu_weights, nu_points, nu_weights);
      },
      py::arg("mu_points"), py::arg("mu_weights"), py::arg("nu_points"), py::arg("nu_weights"),
      py::arg("cost") = "linf", py::arg("exact") = false,
      "Optimal plan between two weighted point clouds. Exact mode returns rationals as strings.");

  m.def(
      "minimal_extremal_face",
      [](const std::string& cost, py::handle q) {
        auto v = to_vec(q);
        auto face = minimal_extremal_face(cost_from(cost, static_cast<int>(v.size())), v);
        py::dict d;
        d["active"] = face.active;
        d["affine_dim"] = face.affine_dim;
        d["slope"] = out_vec(face.slope);
        d["offset"] = out(face.offset);
        py::list dirs;
        for (const auto& dv : face.directions) dirs.append(out_vec(dv));
        d["directions"] = dirs;
        return d;
      },
      py::arg("cost"), py::arg("q"), "Projected face of the cost's epigraph at displacement q (exact).");
}
