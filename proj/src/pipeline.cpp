#include "sudakov/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "sudakov/measure_verify.hpp"

namespace sudakov {

using Json = nlohmann::ordered_json;

Command parse_command(std::string_view name) {
  if (name == "solve") return Command::Solve;
  if (name == "decompose") return Command::Decompose;
  if (name == "refine") return Command::Refine;
  if (name == "extract-map") return Command::ExtractMap;
  if (name == "verify") return Command::Verify;
  if (name == "render") return Command::Render;
  throw InputError("unknown command '" + std::string(name) +
                   "' (solve, decompose, refine, extract-map, verify, render)");
}

std::string to_string(Command c) {
  switch (c) {
    case Command::Solve: return "solve";
    case Command::Decompose: return "decompose";
    case Command::Refine: return "refine";
    case Command::ExtractMap: return "extract-map";
    case Command::Verify: return "verify";
    case Command::Render: return "render";
  }
  return "?";
}

void apply_overrides(ProblemSpec& spec, const Overrides& o) {
  if (o.mode) spec.mode = *o.mode;
  if (o.seed) spec.seed = *o.seed;
  if (o.out) spec.out = *o.out;
  if (o.resolution) {
    if (*o.resolution < 1) throw InputError("resolution must be positive");
    spec.resolution = *o.resolution;
  }
  if (o.slack) {
    if (*o.slack < 0 || *o.slack >= 1) throw InputError("slack must lie in [0, 1)");
    spec.slack = *o.slack;
  }
  if (o.witness_radius) {
    if (parse_rational(*o.witness_radius) <= 0) throw InputError("witness radius must be positive");
    spec.witness_radius = *o.witness_radius;
  }
}

namespace {

Json num(double x) { return x; }
Json num(const Rational& x) { return format_rational(x); }

template <typename T>
Json vec_json(const Vec<T>& v) {
  Json a = Json::array();
  for (const auto& x : v) a.push_back(num(x));
  return a;
}

template <typename T>
Json mat_json(const Vec<Vec<T>>& m) {
  Json a = Json::array();
  for (const auto& r : m) a.push_back(vec_json(r));
  return a;
}

Json ints(const std::vector<int>& v) { return Json(v); }

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

template <typename T>
bool near_zero(const T& x) {
  if constexpr (Num<T>::exact)
    return x == 0;
  else
    return std::fabs(x) <= 1e-9;
}

template <typename T>
std::vector<PlanEntry<T>> restrict_to(const std::vector<PlanEntry<T>>& entries,
                                      const std::vector<int>& members, int m) {
  std::vector<char> in(m, 0);
  for (int i : members) in[i] = 1;
  std::vector<PlanEntry<T>> out;
  for (const auto& e : entries)
    if (in[e.i]) out.push_back(e);
  return out;
}

int capped_resolution(int resolution, int h) {
  // keep resolution^h at most 8e6 cells
  int r = resolution;
  while (r > 2 && std::pow(static_cast<double>(r), h) > 8e6) --r;
  return r;
}

template <typename T>
struct State {
  PolyhedralCost<Rational> cost_q;
  PolyhedralCost<T> cost;
  TransportInstance<T> inst;
  Plan<T> lp;
  Plan<T> plan;  // the analysed plan: given entries, LP potentials
  std::optional<Partition<T>> part;
  std::optional<std::vector<ClassRefinement<T>>> refs;
  std::optional<MongeMap<T>> map;
  std::vector<ClassSlice<T>> map_slices;
  std::optional<FaceOptimalityReport<T>> face;

  std::vector<ClassSlice<T>> finest_slices() const {
    return refs ? slices_from_refinement(*refs) : slices_from_partition(*part);
  }
};

std::string mode_name(Mode m) { return m == Mode::Rational ? "rational" : "float"; }

template <typename T>
void stage_solve(State<T>& s, const ProblemSpec& spec, RunResult& r) {
  s.cost_q = build_cost(spec);
  s.cost = cost_as<T>(s.cost_q);
  auto mu = build_marginal<T>(spec, spec.mu);
  auto nu = build_marginal<T>(spec, spec.nu, &mu);
  s.inst = make_instance<T>(s.cost, mu.points, mu.weights, nu.points, nu.weights);
  s.lp = solve_primal(s.inst);

  s.plan = s.lp;
  const auto& kind = spec.plan.kind;
  if (kind == "csv") {
    auto entries = read_plan_csv<T>(resolve_path(spec, spec.plan.get("path")), s.inst.m(), s.inst.n());
    T total = 0;
    for (const auto& e : entries) total += e.mass;
    if (!(total > 0)) throw InputError("plan CSV carries no mass");
    for (auto& e : entries) e.mass /= total;
    s.plan.entries = std::move(entries);
  } else if (kind == "pushforward") {
    s.plan.entries = plan_from_maps(s.inst, parse_maps(spec.plan, s.inst.dim));
  }
  if (kind != "solve") {
    std::sort(s.plan.entries.begin(), s.plan.entries.end(),
              [](const auto& a, const auto& b) { return std::tie(a.i, a.j) < std::tie(b.i, b.j); });
    if (!near_zero(marginal_error(s.inst, s.plan.entries)))
      throw InputError("the given plan does not couple mu and nu");
    s.plan.value = plan_cost(s.inst, s.plan.entries);
  }

  std::ostringstream csv;
  write_plan_csv(csv, s.plan.entries);
  r.files["plan.csv"] = csv.str();

  Json j;
  j["mode"] = mode_name(spec.mode);
  j["seed"] = spec.seed;
  j["cost"] = spec.cost;
  j["dim"] = s.inst.dim;
  j["sources"] = s.inst.m();
  j["targets"] = s.inst.n();
  j["plan"] = kind;
  j["value"] = num(s.plan.value);
  j["lp_value"] = num(s.lp.value);
  j["gap"] = num(T(s.plan.value - s.lp.value));
  j["entries"] = s.plan.entries.size();
  j["phi"] = vec_json(s.lp.phi);
  j["psi"] = vec_json(s.lp.psi);
  r.files["plan.json"] = dump(j);
  r.files["problem.txt"] = print_problem(spec);

  std::ostringstream line;
  line << "solve: " << s.inst.m() << " x " << s.inst.n() << ", value " << format_scalar(s.plan.value)
       << ", " << s.plan.entries.size() << " entries\n";
  r.summary += line.str();
}

template <typename T>
void stage_decompose(State<T>& s, const ProblemSpec& spec, RunResult& r) {
  ClassifyOptions<T> opts;
  opts.witness_radius = Num<T>::from_rational(parse_rational(spec.witness_radius));
  s.part = first_partition(s.inst, s.cost, s.lp, opts);
  const auto& part = *s.part;

  Json j;
  j["fixed_mass"] = num(part.fixed_mass);
  j["residual_mass"] = num(part.residual_mass);
  Json classes = Json::array();
  for (const auto& c : part.classes) {
    Json k;
    k["label"] = c.label;
    k["h"] = c.h;
    k["active"] = ints(c.active);
    k["basis"] = mat_json(c.directions);
    k["offset"] = vec_json(c.offset);
    k["cone_generators"] = mat_json(c.cone.generators);
    k["members"] = ints(c.members);
    k["mass"] = num(c.mass);
    classes.push_back(std::move(k));
  }
  j["classes"] = std::move(classes);
  Json kinds = Json::array();
  for (const auto& rec : part.records) kinds.push_back(to_string(rec.kind));
  j["point_kinds"] = std::move(kinds);
  j["class_of"] = ints(part.class_of);
  r.files["partition.json"] = dump(j);

  std::ostringstream line;
  line << "decompose: " << part.classes.size() << " classes";
  for (const auto& c : part.classes) line << " [" << c.label << " h=" << c.h << "]";
  line << ", residual mass " << format_scalar(part.residual_mass) << "\n";
  r.summary += line.str();
}

template <typename T>
void stage_refine(State<T>& s, RunResult& r) {
  std::vector<ClassRefinement<T>> refs;
  for (const auto& c : s.part->classes)
    refs.push_back(refine_partition(s.inst, s.cost, c, restrict_to(s.plan.entries, c.members, s.inst.m())));
  const int m = s.inst.m();

  Json j;
  Json classes = Json::array();
  std::size_t total = 0;
  for (const auto& ref : refs) {
    Json k;
    k["label"] = ref.label;
    k["kappa"] = ref.chart.kappa;
    Json theta = Json::array();
    for (const auto& d : ref.theta_prime) theta.push_back(digits_string(d));
    k["theta_prime"] = std::move(theta);
    Json subs = Json::array();
    for (const auto& sc : ref.subclasses) {
      Json x;
      x["parent"] = sc.parent;
      x["label"] = sc.label;
      x["ell"] = sc.ell;
      x["depth"] = sc.depth;
      x["subcone_generators"] = mat_json(sc.subcone.generators);
      x["members"] = ints(sc.members);
      x["targets"] = ints(sc.targets);
      x["mass"] = num(sc.mass);
      x["indecomposable"] = sc.indecomposable;
      // sources are nodes 0..m-1, target j is node m+j
      std::vector<int> cycle;
      for (const auto& n : sc.witness) cycle.push_back(n.target ? m + n.index : n.index);
      x["witness"] = ints(cycle);
      subs.push_back(std::move(x));
    }
    total += ref.subclasses.size();
    k["subclasses"] = std::move(subs);
    classes.push_back(std::move(k));
  }
  j["classes"] = std::move(classes);
  r.files["refinement.json"] = dump(j);

  std::ostringstream line;
  line << "refine: " << total << " subclasses\n";
  r.summary += line.str();
  s.refs = std::move(refs);
}

template <typename T>
Json reconciliation_json(const FaceOptimalityReport<T>& f) {
  Json j;
  Json classes = Json::array();
  for (const auto& c : f.classes) {
    Json k;
    k["label"] = c.label;
    k["mass"] = num(c.mass);
    k["affine_cost"] = num(c.affine_cost);
    k["direct_cost"] = num(c.direct_cost);
    classes.push_back(std::move(k));
  }
  j["classes"] = std::move(classes);
  j["violations"] = f.violations.size();
  j["unclassified_mass"] = num(f.unclassified_mass);
  j["unclassified_cost"] = num(f.unclassified_cost);
  j["formula_total"] = num(f.formula_total);
  j["plan_value"] = num(f.plan_value);
  j["gap"] = num(f.gap);
  j["ok"] = f.ok;
  return j;
}

template <typename T>
void ensure_face_report(State<T>& s) {
  if (!s.face) s.face = verify_face_optimality(s.inst, s.cost, slices_from_partition(*s.part), s.plan.entries);
}

template <typename T>
void stage_map(State<T>& s, RunResult& r) {
  s.map_slices = s.finest_slices();
  s.map = extract_map(s.inst, s.cost, s.map_slices, s.plan.entries);
  ensure_face_report(s);
  const auto& mp = *s.map;

  std::ostringstream csv;
  write_plan_csv(csv, mp.entries, "source_index,target_index,mass");
  r.files["map.csv"] = csv.str();

  Json j;
  j["deterministic"] = mp.deterministic();
  j["pushforward_residual"] = num(mp.pushforward_residual);
  std::vector<int> split;
  for (int i = 0; i < static_cast<int>(mp.split.size()); ++i)
    if (mp.split[i]) split.push_back(i);
  j["split_sources"] = ints(split);
  j["unclassified"] = ints(mp.unclassified);
  Json classes = Json::array();
  for (const auto& c : mp.classes) {
    Json k;
    k["label"] = c.label;
    k["mass"] = num(c.mass);
    k["deterministic"] = c.deterministic;
    k["primary_cost"] = num(c.primary_cost);
    k["primary_cost_before"] = num(c.primary_cost_before);
    k["secondary_cost"] = num(c.secondary_cost);
    k["pushforward_residual"] = num(c.pushforward_residual);
    classes.push_back(std::move(k));
  }
  j["classes"] = std::move(classes);
  j["reconciliation"] = reconciliation_json(*s.face);
  r.files["map.json"] = dump(j);

  std::ostringstream line;
  line << "extract-map: " << (mp.deterministic() ? "deterministic" : "split") << ", "
       << split.size() << " split sources, reconciliation " << (s.face->ok ? "ok" : "FAILED") << "\n";
  r.summary += line.str();
}

template <typename T>
Json area_for_class(const State<T>& s, const FaceClass<T>& c, const ProblemSpec& spec,
                    std::vector<InvariantCheck>& checks) {
  Json k;
  k["label"] = c.label;
  k["h"] = c.h;
  if (c.h < 1 || c.members.empty()) {
    k["skipped"] = "no transport directions";
    return k;
  }
  Face<Rational> face;
  if constexpr (Num<T>::exact) {
    face = c.face;
  } else {
    face = minimal_extremal_face(s.cost_q, convert_vec<Rational>(c.face.point));
    if (face.active != c.active) {
      k["skipped"] = "face not reproduced in exact arithmetic";
      return k;
    }
  }
  Cone<Rational> cone = lifted_face_cone(s.cost_q, face);
  auto chart = make_chart(face, cone, convert_vec<Rational>(s.inst.mu_points[c.members[0]]));
  const int res = capped_resolution(spec.resolution, c.h);
  auto rep = area_estimate_check(chart.cone, Rational(1), Rational(1, 2), Rational(1, 4), res, spec.slack);
  k["t_bar"] = "1";
  k["s"] = "1/2";
  k["eps"] = "1/4";
  k["resolution"] = res;
  k["alpha"] = format_rational(rep.alpha);
  k["set_cells"] = rep.set_cells;
  k["image_cells"] = rep.image_cells;
  k["ratio"] = rep.ratio;
  k["bound"] = rep.bound;
  k["slack"] = rep.slack;
  k["ok"] = rep.ok;
  InvariantCheck chk{"area estimate " + c.label, rep.ok, ""};
  if (!rep.ok) {
    std::ostringstream w;
    w << "ratio " << rep.ratio << " below " << (1 - rep.slack) << " * " << rep.bound;
    chk.witness = w.str();
  }
  checks.push_back(std::move(chk));
  return k;
}

template <typename T>
void stage_verify(State<T>& s, const ProblemSpec& spec, RunResult& r) {
  ensure_face_report(s);
  RunArtifacts<T> run;
  run.inst = &s.inst;
  run.cost = &s.cost;
  run.plan = &s.plan;
  run.partition = &*s.part;
  if (s.refs) run.refinements = &*s.refs;
  if (s.map) {
    run.map = &*s.map;
    run.map_slices = &s.map_slices;
  }
  run.face_report = &*s.face;
  auto checks = invariant_suite(run);

  Json areas = Json::array();
  for (const auto& c : s.part->classes) areas.push_back(area_for_class(s, c, spec, checks));

  Json j;
  j["mode"] = mode_name(spec.mode);
  j["seed"] = spec.seed;
  Json cj = Json::array();
  for (const auto& c : checks) {
    Json k;
    k["name"] = c.name;
    k["ok"] = c.ok;
    if (!c.witness.empty()) k["witness"] = c.witness;
    cj.push_back(std::move(k));
  }
  const bool passed = all_passed(checks);
  j["passed"] = passed;
  j["checks"] = std::move(cj);
  j["reconciliation"] = reconciliation_json(*s.face);
  j["area_estimates"] = std::move(areas);

  auto slices = s.finest_slices();
  std::ostringstream hist_csv;
  hist_csv << "label,bin,mass\n";
  Json dis;
  if (slices.empty()) {
    dis["skipped"] = "no classes";
  } else {
    auto rep = disintegration_report(s.inst, slices, 16);
    dis["resolution"] = rep.resolution;
    dis["class_mass"] = rep.class_mass;
    dis["residual_mass"] = rep.residual_mass;
    dis["total_mass"] = rep.total_mass;
    dis["mass_balanced"] = rep.mass_balanced;
    dis["any_concentrated"] = rep.any_concentrated;
    Json classes = Json::array();
    for (const auto& h : rep.classes) {
      Json k;
      k["label"] = h.label;
      k["h"] = h.h;
      k["mass"] = h.mass;
      k["occupied"] = h.occupied;
      k["max_density"] = h.max_density;
      k["top_share"] = h.top_share;
      k["concentrated"] = h.concentrated;
      k["quotient"] = h.quotient;
      classes.push_back(std::move(k));
      for (std::size_t b = 0; b < h.bins.size(); ++b)
        if (h.bins[b] > 0) hist_csv << h.label << ',' << b << ',' << format_scalar(h.bins[b]) << '\n';
    }
    dis["classes"] = std::move(classes);
  }
  j["disintegration"] = std::move(dis);
  j["residual"] = {{"fixed_mass", num(s.part->fixed_mass)}, {"residual_mass", num(s.part->residual_mass)}};
  r.files["verify.json"] = dump(j);
  r.files["histograms.csv"] = hist_csv.str();

  int failed = 0;
  for (const auto& c : checks) failed += c.ok ? 0 : 1;
  std::ostringstream line;
  line << "verify: " << checks.size() - failed << "/" << checks.size() << " checks passed";
  for (const auto& c : checks)
    if (!c.ok) line << "\n  FAILED " << c.name << (c.witness.empty() ? "" : ": " + c.witness);
  line << "\n";
  r.summary += line.str();
  if (!passed) r.status = kExitInvariant;
}

// --- SVG -------------------------------------------------------------------

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b",
                          "#e377c2", "#17becf", "#bcbd22", "#7f7f7f", "#393b79", "#637939"};

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", x);
  return buf;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '&') out += "&amp;";
    else if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else if (c == '"') out += "&quot;";
    else out += c;
  }
  return out;
}

template <typename T>
struct Group {
  std::string label;
  int h = 0;
  double mass = 0;
  const Cone<T>* cone = nullptr;
  std::vector<int> members;
};

template <typename T>
void stage_render(State<T>& s, RunResult& r) {
  std::vector<Group<T>> groups;
  if (s.refs) {
    for (const auto& ref : *s.refs)
      for (const auto& sc : ref.subclasses)
        groups.push_back({sc.label, sc.ell, to_double(sc.mass), &sc.subcone, sc.members});
  } else {
    for (const auto& c : s.part->classes)
      groups.push_back({c.label, c.h, to_double(c.mass), &c.cone, c.members});
  }

  double lo[2] = {1e300, 1e300}, hi[2] = {-1e300, -1e300};
  auto grow = [&](const Vec<T>& p) {
    for (int a = 0; a < 2; ++a) {
      lo[a] = std::min(lo[a], to_double(p[a]));
      hi[a] = std::max(hi[a], to_double(p[a]));
    }
  };
  for (const auto& p : s.inst.mu_points) grow(p);
  for (const auto& p : s.inst.nu_points) grow(p);
  double span = std::max({hi[0] - lo[0], hi[1] - lo[1], 1e-9});
  const double pad = 0.08 * span;
  const double x0 = lo[0] - pad, y0 = lo[1] - pad, full = span + 2 * pad;
  const double plot = 660, margin = 20, legend_x = plot + 2 * margin + 10;
  auto X = [&](double x) { return margin + (x - x0) / full * plot; };
  auto Y = [&](double y) { return margin + plot - (y - y0) / full * plot; };  // y up
  const double dot = std::clamp(400.0 / std::sqrt(1.0 + s.inst.m()), 1.0, 5.0);

  std::ostringstream svg;
  const int height = static_cast<int>(plot + 2 * margin);
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"960\" height=\"" << height
      << "\" viewBox=\"0 0 960 " << height << "\">\n";
  svg << "<defs><marker id=\"arrow\" viewBox=\"0 0 10 10\" refX=\"10\" refY=\"5\" markerWidth=\"5\" "
         "markerHeight=\"5\" orient=\"auto-start-reverse\"><path d=\"M 0 0 L 10 5 L 0 10 z\" "
         "fill=\"#444\"/></marker></defs>\n";
  svg << "<rect x=\"0\" y=\"0\" width=\"960\" height=\"" << height << "\" fill=\"white\"/>\n";
  svg << "<rect x=\"" << fmt(margin) << "\" y=\"" << fmt(margin) << "\" width=\"" << fmt(plot)
      << "\" height=\"" << fmt(plot) << "\" fill=\"none\" stroke=\"#ccc\"/>\n";
  if (x0 < 0 && x0 + full > 0)
    svg << "<line x1=\"" << fmt(X(0)) << "\" y1=\"" << fmt(Y(y0)) << "\" x2=\"" << fmt(X(0)) << "\" y2=\""
        << fmt(Y(y0 + full)) << "\" stroke=\"#eee\"/>\n";
  if (y0 < 0 && y0 + full > 0)
    svg << "<line x1=\"" << fmt(X(x0)) << "\" y1=\"" << fmt(Y(0)) << "\" x2=\"" << fmt(X(x0 + full))
        << "\" y2=\"" << fmt(Y(0)) << "\" stroke=\"#eee\"/>\n";

  // transport directions: the face O (the negated t = 1 section) drawn at the class barycentre
  const double reach = 0.2 * span;
  svg << "<g id=\"cones\">\n";
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const auto& gr = groups[g];
    if (gr.members.empty()) continue;
    double bx = 0, by = 0, w = 0;
    for (int i : gr.members) {
      double wi = to_double(s.inst.mu_weights[i]);
      bx += wi * to_double(s.inst.mu_points[i][0]);
      by += wi * to_double(s.inst.mu_points[i][1]);
      w += wi;
    }
    bx /= w;
    by /= w;
    auto poly = section_polygon(*gr.cone, reach);
    const char* colour = kPalette[g % std::size(kPalette)];
    if (poly.size() >= 3) {
      svg << "<polygon points=\"";
      for (std::size_t k = 0; k < poly.size(); ++k)
        svg << (k ? " " : "") << fmt(X(bx - poly[k].first)) << ',' << fmt(Y(by - poly[k].second));
      svg << "\" fill=\"" << colour << "\" fill-opacity=\"0.18\" stroke=\"" << colour << "\"/>\n";
    } else if (poly.size() == 2) {
      svg << "<line x1=\"" << fmt(X(bx - poly[0].first)) << "\" y1=\"" << fmt(Y(by - poly[0].second))
          << "\" x2=\"" << fmt(X(bx - poly[1].first)) << "\" y2=\"" << fmt(Y(by - poly[1].second))
          << "\" stroke=\"" << colour << "\" stroke-width=\"2\" stroke-opacity=\"0.6\"/>\n";
    }
  }
  svg << "</g>\n";

  svg << "<g id=\"targets\" fill=\"#999\">\n";
  for (const auto& p : s.inst.nu_points)
    svg << "<rect x=\"" << fmt(X(to_double(p[0])) - dot / 2) << "\" y=\"" << fmt(Y(to_double(p[1])) - dot / 2)
        << "\" width=\"" << fmt(dot) << "\" height=\"" << fmt(dot) << "\"/>\n";
  svg << "</g>\n";

  std::vector<int> colour_of(s.inst.m(), -1);
  for (std::size_t g = 0; g < groups.size(); ++g)
    for (int i : groups[g].members) colour_of[i] = static_cast<int>(g);
  svg << "<g id=\"sources\">\n";
  for (int i = 0; i < s.inst.m(); ++i) {
    const auto& p = s.inst.mu_points[i];
    const char* colour = colour_of[i] < 0 ? "#000" : kPalette[colour_of[i] % std::size(kPalette)];
    svg << "<circle cx=\"" << fmt(X(to_double(p[0]))) << "\" cy=\"" << fmt(Y(to_double(p[1])))
        << "\" r=\"" << fmt(dot / 2) << "\" fill=\"" << colour << "\"/>\n";
  }
  svg << "</g>\n";

  if (s.map) {
    svg << "<g id=\"map\" stroke=\"#444\" stroke-width=\"0.6\" stroke-opacity=\"0.5\">\n";
    for (int i = 0; i < s.inst.m(); ++i) {
      const auto& img = s.map->image[i];
      if (img.empty()) continue;
      const auto& p = s.inst.mu_points[i];
      svg << "<line x1=\"" << fmt(X(to_double(p[0]))) << "\" y1=\"" << fmt(Y(to_double(p[1]))) << "\" x2=\""
          << fmt(X(to_double(img[0]))) << "\" y2=\"" << fmt(Y(to_double(img[1])))
          << "\" marker-end=\"url(#arrow)\"/>\n";
    }
    svg << "</g>\n";
  }

  svg << "<g id=\"legend\" font-family=\"sans-serif\" font-size=\"11\">\n";
  svg << "<text x=\"" << fmt(legend_x) << "\" y=\"32\" font-weight=\"bold\">"
      << (s.refs ? "subclasses" : "classes") << " (" << groups.size() << ")</text>\n";
  const std::size_t shown = std::min<std::size_t>(groups.size(), 40);
  for (std::size_t g = 0; g < shown; ++g) {
    double y = 48 + 15.0 * g;
    svg << "<rect x=\"" << fmt(legend_x) << "\" y=\"" << fmt(y - 9) << "\" width=\"10\" height=\"10\" fill=\""
        << kPalette[g % std::size(kPalette)] << "\"/>";
    svg << "<text x=\"" << fmt(legend_x + 16) << "\" y=\"" << fmt(y) << "\">" << xml_escape(groups[g].label)
        << (s.refs ? " ell=" : " h=") << groups[g].h << " mass=" << fmt(groups[g].mass) << "</text>\n";
  }
  double y = 48 + 15.0 * shown;
  if (shown < groups.size())
    svg << "<text x=\"" << fmt(legend_x) << "\" y=\"" << fmt(y) << "\">... " << groups.size() - shown
        << " more</text>\n";
  y += 20;
  svg << "<circle cx=\"" << fmt(legend_x + 5) << "\" cy=\"" << fmt(y - 4) << "\" r=\"3\" fill=\"#000\"/>"
      << "<text x=\"" << fmt(legend_x + 16) << "\" y=\"" << fmt(y) << "\">unclassified source</text>\n";
  y += 15;
  svg << "<rect x=\"" << fmt(legend_x + 2) << "\" y=\"" << fmt(y - 7) << "\" width=\"6\" height=\"6\" fill=\"#999\"/>"
      << "<text x=\"" << fmt(legend_x + 16) << "\" y=\"" << fmt(y) << "\">target</text>\n";
  if (s.map) {
    y += 15;
    svg << "<line x1=\"" << fmt(legend_x) << "\" y1=\"" << fmt(y - 4) << "\" x2=\"" << fmt(legend_x + 12)
        << "\" y2=\"" << fmt(y - 4) << "\" stroke=\"#444\" marker-end=\"url(#arrow)\"/>"
        << "<text x=\"" << fmt(legend_x + 16) << "\" y=\"" << fmt(y) << "\">map x -&gt; T(x)</text>\n";
  }
  svg << "</g>\n</svg>\n";
  r.files["render.svg"] = svg.str();
  r.summary += "render: " + std::to_string(groups.size()) + " groups\n";
}

template <typename T>
RunResult run_typed(Command cmd, const ProblemSpec& spec) {
  RunResult r;
  State<T> s;
  const bool wants_refine = cmd == Command::Refine ||
                            (spec.refine && (cmd == Command::ExtractMap || cmd == Command::Verify ||
                                             cmd == Command::Render));
  const bool wants_map = cmd == Command::ExtractMap ||
                         (spec.extract_map && (cmd == Command::Verify || cmd == Command::Render));

  stage_solve(s, spec, r);
  if (cmd == Command::Solve) return r;
  stage_decompose(s, spec, r);
  if (wants_refine) stage_refine(s, r);
  if (wants_map) stage_map(s, r);
  if (cmd == Command::Verify) stage_verify(s, spec, r);
  if (cmd == Command::Render) stage_render(s, r);
  return r;
}

}  // namespace

RunResult run_pipeline(Command cmd, const ProblemSpec& spec) {
  if (cmd == Command::Render) {
    int d = problem_dim(spec);
    if (d != 2) throw InputError("render supports dimension 2 only, this problem has dimension " + std::to_string(d));
  }
  return spec.mode == Mode::Rational ? run_typed<Rational>(cmd, spec) : run_typed<double>(cmd, spec);
}

void write_outputs(const RunResult& result, const std::string& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw InputError("cannot create '" + out_dir + "': " + ec.message());
  for (const auto& [name, text] : result.files) {
    auto path = std::filesystem::path(out_dir) / name;
    std::ofstream os(path, std::ios::binary);
    if (!os) throw InputError("cannot write '" + path.string() + "'");
    os << text;
  }
}

}  // namespace sudakov
