#include "sudakov/io.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

namespace sudakov {

namespace {

struct Token {
  std::string text;
  int column;  // 1-based
};

std::vector<Token> tokenize(std::string_view line) {
  std::vector<Token> out;
  std::size_t k = 0;
  while (k < line.size()) {
    while (k < line.size() && std::isspace(static_cast<unsigned char>(line[k]))) ++k;
    if (k >= line.size() || line[k] == '#') break;
    std::size_t start = k;
    while (k < line.size() && !std::isspace(static_cast<unsigned char>(line[k]))) ++k;
    out.push_back({std::string(line.substr(start, k - start)), static_cast<int>(start) + 1});
  }
  return out;
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (end == text.size() && line.empty() && !out.empty()) break;  // trailing newline
    out.push_back(line);
    if (end == text.size()) break;
    start = end + 1;
  }
  return out;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto end = s.find(sep, start);
    out.push_back(s.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start));
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  return out;
}

Rational number_at(std::string_view text, int line, int column) {
  try {
    return parse_rational(text);
  } catch (const ParseError&) {
    throw;
  } catch (const InputError& e) {
    throw ParseError(e.what(), line, column);
  }
}

long long integer_at(std::string_view text, int line, int column) {
  Rational r = number_at(text, line, column);
  if (boost::multiprecision::denominator(r) != 1)
    throw ParseError("expected an integer, got '" + std::string(text) + "'", line, column);
  return boost::multiprecision::numerator(r).convert_to<long long>();
}

bool parse_flag(const Token& t, int line) {
  static const std::map<std::string, bool> words{{"on", true},   {"off", false}, {"yes", true},
                                                 {"no", false},  {"true", true}, {"false", false},
                                                 {"1", true},    {"0", false}};
  auto it = words.find(t.text);
  if (it == words.end()) throw ParseError("expected on/off, got '" + t.text + "'", line, t.column);
  return it->second;
}

struct KindRule {
  std::set<std::string> required;
  std::set<std::string> optional;
};

const std::map<std::string, KindRule>& marginal_rules() {
  static const std::map<std::string, KindRule> rules{
      {"disc", {{"center", "radius", "count"}, {"sampler", "stream", "reflect"}}},
      {"lattice", {{"center", "radius", "step"}, {"reflect"}}},
      {"segment", {{"from", "to", "count"}, {"density", "reflect"}}},
      {"grid", {{"lo", "hi", "counts"}, {"reflect"}}},
      {"csv", {{"path"}, {"reflect"}}},
      {"pushforward", {{"matrix"}, {"offset"}}},
  };
  return rules;
}

const std::map<std::string, KindRule>& plan_rules() {
  static const std::map<std::string, KindRule> rules{
      {"solve", {{}, {}}},
      {"csv", {{"path"}, {}}},
      {"pushforward", {{"matrix"}, {"offset"}}},
  };
  return rules;
}

void check_value(const std::string& key, const std::string& value, int line, int column) {
  static const std::set<std::string> vectors{"center", "from", "to", "lo", "hi", "offset"};
  static const std::set<std::string> scalars{"radius", "step"};
  static const std::set<std::string> integers{"count", "stream", "reflect"};
  if (value.empty()) throw ParseError("empty value for '" + key + "'", line, column);
  if (vectors.count(key)) {
    for (auto part : split(value, ',')) number_at(part, line, column);
  } else if (scalars.count(key)) {
    if (number_at(value, line, column) <= 0)
      throw ParseError("'" + key + "' must be positive", line, column);
  } else if (integers.count(key)) {
    if (integer_at(value, line, column) < 0)
      throw ParseError("'" + key + "' must be nonnegative", line, column);
  } else if (key == "counts") {
    for (auto part : split(value, ','))
      if (integer_at(part, line, column) < 1)
        throw ParseError("grid counts must be positive", line, column);
  } else if (key == "matrix") {
    for (auto row : split(value, ';'))
      for (auto part : split(row, ',')) number_at(part, line, column);
  } else if (key == "sampler") {
    if (value != "stratified" && value != "montecarlo")
      throw ParseError("sampler must be stratified or montecarlo", line, column);
  } else if (key == "density") {
    if (value != "uniform" && value != "twin-tent")
      throw ParseError("density must be uniform or twin-tent", line, column);
  }
}

GeneratorSpec parse_generator(const std::vector<Token>& toks, std::size_t from, int line,
                              const std::map<std::string, KindRule>& rules, const std::string& what) {
  if (toks.size() <= from) throw ParseError(what + ": missing kind", line, toks.back().column);
  GeneratorSpec g;
  g.kind = toks[from].text;
  auto rule = rules.find(g.kind);
  if (rule == rules.end())
    throw ParseError(what + ": unknown kind '" + g.kind + "'", line, toks[from].column);
  for (std::size_t k = from + 1; k < toks.size(); ++k) {
    const auto& t = toks[k];
    auto eq = t.text.find('=');
    if (eq == std::string::npos || eq == 0)
      throw ParseError("expected key=value, got '" + t.text + "'", line, t.column);
    std::string key = t.text.substr(0, eq), value = t.text.substr(eq + 1);
    if (!rule->second.required.count(key) && !rule->second.optional.count(key))
      throw ParseError("unknown parameter '" + key + "' for " + g.kind, line, t.column);
    check_value(key, value, line, t.column + static_cast<int>(eq) + 1);
    g.params.emplace_back(key, value);
  }
  for (const auto& key : rule->second.required)
    if (!g.has(key))
      throw ParseError(what + " " + g.kind + ": missing '" + key + "'", line, toks[from].column);
  return g;
}

std::string format_double(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

template <typename T>
std::string csv_scalar(const T& x) {
  return format_scalar(x);
}

}  // namespace

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

PolyhedralCost<Rational> parse_cost_text(std::string_view text) {
  int dim = 0;
  Vec<Vec<Rational>> a;
  Vec<Rational> b;
  auto lines = split_lines(text);
  for (std::size_t l = 0; l < lines.size(); ++l) {
    const int ln = static_cast<int>(l) + 1;
    auto toks = tokenize(lines[l]);
    if (toks.empty()) continue;
    if (toks[0].text == "dim") {
      if (dim != 0) throw ParseError("duplicate dim", ln, toks[0].column);
      if (toks.size() != 2) throw ParseError("dim takes one value", ln, toks[0].column);
      long long d = integer_at(toks[1].text, ln, toks[1].column);
      if (d < 1) throw ParseError("dim must be positive", ln, toks[1].column);
      dim = static_cast<int>(d);
    } else if (toks[0].text == "piece") {
      if (dim == 0) throw ParseError("piece before dim", ln, toks[0].column);
      if (static_cast<int>(toks.size()) != dim + 2)
        throw ParseError("piece needs " + std::to_string(dim + 1) + " numbers", ln, toks[0].column);
      Vec<Rational> row;
      for (int k = 1; k <= dim; ++k) row.push_back(number_at(toks[k].text, ln, toks[k].column));
      a.push_back(std::move(row));
      b.push_back(number_at(toks[dim + 1].text, ln, toks[dim + 1].column));
    } else {
      throw ParseError("unknown keyword '" + toks[0].text + "'", ln, toks[0].column);
    }
  }
  if (dim == 0) throw ParseError("missing dim", static_cast<int>(lines.size()), 1);
  if (a.empty()) throw ParseError("no pieces", static_cast<int>(lines.size()), 1);
  return make_cost<Rational>(dim, a, b, "file");
}

PolyhedralCost<Rational> read_cost_file(const std::string& path) {
  return parse_cost_text(read_text_file(path));
}

std::string format_cost(const PolyhedralCost<Rational>& cost) {
  if (cost.strictly_convex) throw InputError("strictly convex costs have no piece list");
  std::ostringstream os;
  os << "dim " << cost.dim << "\n";
  for (std::size_t i = 0; i < cost.size(); ++i) {
    os << "piece";
    for (const auto& v : cost.a[i]) os << ' ' << format_rational(v);
    os << ' ' << format_rational(cost.b[i]) << "\n";
  }
  return os.str();
}

template <typename T>
PolyhedralCost<T> cost_as(const PolyhedralCost<Rational>& c) {
  PolyhedralCost<T> out;
  out.dim = c.dim;
  out.strictly_convex = c.strictly_convex;
  out.name = c.name;
  for (std::size_t i = 0; i < c.size(); ++i) {
    out.a.push_back(convert_vec<T>(c.a[i]));
    out.b.push_back(convert_scalar<T>(c.b[i]));
  }
  return out;
}

template <typename T>
WeightedPoints<T> parse_marginal_csv(std::string_view text, int dim) {
  WeightedPoints<T> out;
  auto lines = split_lines(text);
  for (std::size_t l = 0; l < lines.size(); ++l) {
    const int ln = static_cast<int>(l) + 1;
    auto line = lines[l];
    auto first = line.find_first_not_of(" \t");
    if (first == std::string_view::npos || line[first] == '#') continue;
    auto cells = split(line, ',');
    if (out.points.empty() && std::isalpha(static_cast<unsigned char>(line[first]))) continue;  // header
    if (dim == 0) dim = static_cast<int>(cells.size()) - 1;
    if (dim < 1 || static_cast<int>(cells.size()) != dim + 1)
      throw ParseError("expected " + std::to_string(dim + 1) + " columns", ln, 1);
    Vec<T> p;
    int col = 1;
    for (int k = 0; k < dim; ++k) {
      p.push_back(Num<T>::from_rational(number_at(cells[k], ln, col)));
      col += static_cast<int>(cells[k].size()) + 1;
    }
    Rational w = number_at(cells[dim], ln, col);
    if (w <= 0) throw ParseError("weights must be positive", ln, col);
    out.points.push_back(std::move(p));
    out.weights.push_back(Num<T>::from_rational(w));
  }
  if (out.points.empty()) throw InputError("marginal CSV has no rows");
  return out;
}

template <typename T>
WeightedPoints<T> read_marginal_csv(const std::string& path, int dim) {
  return parse_marginal_csv<T>(read_text_file(path), dim);
}

template <typename T>
void write_marginal_csv(std::ostream& os, const WeightedPoints<T>& pts) {
  for (std::size_t k = 0; k < pts.points.size(); ++k) {
    for (const auto& v : pts.points[k]) os << csv_scalar(v) << ',';
    os << csv_scalar(pts.weights[k]) << '\n';
  }
}

template <typename T>
std::vector<PlanEntry<T>> parse_plan_csv(std::string_view text, int m, int n) {
  std::vector<PlanEntry<T>> out;
  auto lines = split_lines(text);
  for (std::size_t l = 0; l < lines.size(); ++l) {
    const int ln = static_cast<int>(l) + 1;
    auto line = lines[l];
    auto first = line.find_first_not_of(" \t");
    if (first == std::string_view::npos || line[first] == '#') continue;
    if (out.empty() && std::isalpha(static_cast<unsigned char>(line[first]))) continue;  // header
    auto cells = split(line, ',');
    if (cells.size() != 3) throw ParseError("expected i,j,mass", ln, 1);
    long long i = integer_at(cells[0], ln, 1);
    int cj = static_cast<int>(cells[0].size()) + 2;
    long long j = integer_at(cells[1], ln, cj);
    int cm = cj + static_cast<int>(cells[1].size()) + 1;
    Rational mass = number_at(cells[2], ln, cm);
    if (i < 0 || i >= m) throw ParseError("source index out of range", ln, 1);
    if (j < 0 || j >= n) throw ParseError("target index out of range", ln, cj);
    if (mass <= 0) throw ParseError("mass must be positive", ln, cm);
    out.push_back({static_cast<int>(i), static_cast<int>(j), Num<T>::from_rational(mass)});
  }
  return out;
}

template <typename T>
std::vector<PlanEntry<T>> read_plan_csv(const std::string& path, int m, int n) {
  return parse_plan_csv<T>(read_text_file(path), m, n);
}

template <typename T>
void write_plan_csv(std::ostream& os, const std::vector<PlanEntry<T>>& entries,
                    const std::string& header) {
  if (!header.empty()) os << header << '\n';
  for (const auto& e : entries) os << e.i << ',' << e.j << ',' << csv_scalar(e.mass) << '\n';
}

bool GeneratorSpec::has(const std::string& key) const {
  return std::any_of(params.begin(), params.end(), [&](const auto& p) { return p.first == key; });
}

const std::string& GeneratorSpec::get(const std::string& key) const {
  for (const auto& p : params)
    if (p.first == key) return p.second;
  throw InputError(kind + ": missing '" + key + "'");
}

std::string GeneratorSpec::get_or(const std::string& key, const std::string& fallback) const {
  return has(key) ? get(key) : fallback;
}

std::vector<std::string> GeneratorSpec::all(const std::string& key) const {
  std::vector<std::string> out;
  for (const auto& p : params)
    if (p.first == key) out.push_back(p.second);
  return out;
}

bool ProblemSpec::operator==(const ProblemSpec& o) const {
  return cost == o.cost && dim == o.dim && mode == o.mode && seed == o.seed && out == o.out &&
         mu == o.mu && nu == o.nu && plan == o.plan && refine == o.refine &&
         extract_map == o.extract_map && verify == o.verify && resolution == o.resolution &&
         slack == o.slack && witness_radius == o.witness_radius;
}

ProblemSpec parse_problem_text(std::string_view text, const std::string& base_dir) {
  ProblemSpec spec;
  spec.base_dir = base_dir;
  std::set<std::string> seen;
  auto lines = split_lines(text);
  for (std::size_t l = 0; l < lines.size(); ++l) {
    const int ln = static_cast<int>(l) + 1;
    auto toks = tokenize(lines[l]);
    if (toks.empty()) continue;
    const std::string& key = toks[0].text;
    auto one = [&]() -> const Token& {
      if (toks.size() != 2) throw ParseError("'" + key + "' takes one value", ln, toks[0].column);
      return toks[1];
    };
    if (key != "mu" && key != "nu") {
      if (seen.count(key)) throw ParseError("duplicate key '" + key + "'", ln, toks[0].column);
      seen.insert(key);
    }
    if (key == "cost") {
      spec.cost = one().text;
    } else if (key == "dim") {
      long long d = integer_at(one().text, ln, toks[1].column);
      if (d < 1) throw ParseError("dim must be positive", ln, toks[1].column);
      spec.dim = static_cast<int>(d);
    } else if (key == "mode") {
      const auto& v = one();
      if (v.text == "rational")
        spec.mode = Mode::Rational;
      else if (v.text == "float")
        spec.mode = Mode::Float;
      else
        throw ParseError("mode must be rational or float", ln, v.column);
    } else if (key == "seed") {
      const auto& v = one();
      if (v.text.empty() || !std::all_of(v.text.begin(), v.text.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
        throw ParseError("seed must be a nonnegative integer", ln, v.column);
      try {
        spec.seed = std::stoull(v.text);
      } catch (const std::exception&) {
        throw ParseError("seed out of range", ln, v.column);
      }
    } else if (key == "out") {
      spec.out = one().text;
    } else if (key == "mu" || key == "nu") {
      auto g = parse_generator(toks, 1, ln, marginal_rules(), key);
      if (key == "mu" && g.kind == "pushforward")
        throw ParseError("mu cannot be a pushforward", ln, toks[1].column);
      (key == "mu" ? spec.mu : spec.nu).push_back(std::move(g));
    } else if (key == "plan") {
      spec.plan = parse_generator(toks, 1, ln, plan_rules(), key);
    } else if (key == "refine") {
      spec.refine = parse_flag(one(), ln);
    } else if (key == "extract-map") {
      spec.extract_map = parse_flag(one(), ln);
    } else if (key == "verify") {
      spec.verify = parse_flag(one(), ln);
    } else if (key == "resolution") {
      long long r = integer_at(one().text, ln, toks[1].column);
      if (r < 1) throw ParseError("resolution must be positive", ln, toks[1].column);
      spec.resolution = static_cast<int>(r);
    } else if (key == "slack") {
      Rational s = number_at(one().text, ln, toks[1].column);
      if (s < 0 || s >= 1) throw ParseError("slack must lie in [0, 1)", ln, toks[1].column);
      spec.slack = s.convert_to<double>();
    } else if (key == "witness-radius") {
      if (number_at(one().text, ln, toks[1].column) <= 0)
        throw ParseError("witness-radius must be positive", ln, toks[1].column);
      spec.witness_radius = toks[1].text;
    } else {
      throw ParseError("unknown key '" + key + "'", ln, toks[0].column);
    }
  }
  if (spec.mu.empty()) throw ParseError("no mu given", static_cast<int>(lines.size()), 1);
  if (spec.nu.empty()) throw ParseError("no nu given", static_cast<int>(lines.size()), 1);
  return spec;
}

ProblemSpec parse_problem(const std::string& path) {
  auto dir = std::filesystem::path(path).parent_path().string();
  return parse_problem_text(read_text_file(path), dir);
}

std::string print_problem(const ProblemSpec& spec) {
  std::ostringstream os;
  auto line = [&](const std::string& head, const GeneratorSpec& g) {
    os << head << ' ' << g.kind;
    for (const auto& [k, v] : g.params) os << ' ' << k << '=' << v;
    os << '\n';
  };
  os << "cost " << spec.cost << '\n';
  if (spec.dim > 0) os << "dim " << spec.dim << '\n';
  os << "mode " << (spec.mode == Mode::Rational ? "rational" : "float") << '\n';
  os << "seed " << spec.seed << '\n';
  os << "out " << spec.out << '\n';
  for (const auto& g : spec.mu) line("mu", g);
  for (const auto& g : spec.nu) line("nu", g);
  line("plan", spec.plan);
  os << "refine " << (spec.refine ? "on" : "off") << '\n';
  os << "extract-map " << (spec.extract_map ? "on" : "off") << '\n';
  os << "verify " << (spec.verify ? "on" : "off") << '\n';
  os << "resolution " << spec.resolution << '\n';
  os << "slack " << format_double(spec.slack) << '\n';
  os << "witness-radius " << spec.witness_radius << '\n';
  return os.str();
}

std::string resolve_path(const ProblemSpec& spec, const std::string& path) {
  std::filesystem::path p(path);
  if (p.is_absolute() || spec.base_dir.empty()) return path;
  return (std::filesystem::path(spec.base_dir) / p).string();
}

bool is_preset(const std::string& name) {
  return name == "linf" || name == "l1" || name == "quadratic";
}

int problem_dim(const ProblemSpec& spec) {
  if (spec.dim > 0) return spec.dim;
  if (!is_preset(spec.cost)) return read_cost_file(resolve_path(spec, spec.cost)).dim;
  for (const auto& g : spec.mu) {
    for (const char* k : {"center", "from", "lo"})
      if (g.has(k)) return static_cast<int>(parse_vector(g.get(k)).size());
    if (g.kind == "csv")
      return static_cast<int>(read_marginal_csv<Rational>(resolve_path(spec, g.get("path"))).points[0].size());
  }
  throw InputError("cannot infer the dimension; add a 'dim' line");
}

PolyhedralCost<Rational> build_cost(const ProblemSpec& spec) {
  if (is_preset(spec.cost)) return preset_cost<Rational>(spec.cost, problem_dim(spec));
  auto c = read_cost_file(resolve_path(spec, spec.cost));
  if (spec.dim > 0 && c.dim != spec.dim) throw InputError("cost file dimension differs from dim");
  return c;
}

Vec<Rational> parse_vector(std::string_view text) {
  Vec<Rational> out;
  for (auto part : split(text, ',')) out.push_back(parse_rational(part));
  return out;
}

Mat<Rational> parse_matrix(std::string_view text) {
  Mat<Rational> out;
  for (auto row : split(text, ';')) out.push_back(parse_vector(row));
  return out;
}

std::vector<std::pair<Mat<Rational>, Vec<Rational>>> parse_maps(const GeneratorSpec& g, int dim) {
  auto mats = g.all("matrix");
  auto offs = g.all("offset");
  if (!offs.empty() && offs.size() != mats.size())
    throw InputError("pushforward: give one offset per matrix or none");
  std::vector<std::pair<Mat<Rational>, Vec<Rational>>> out;
  for (std::size_t k = 0; k < mats.size(); ++k) {
    auto A = parse_matrix(mats[k]);
    Vec<Rational> b = offs.empty() ? Vec<Rational>(dim, Rational(0)) : parse_vector(offs[k]);
    if (static_cast<int>(A.size()) != dim || static_cast<int>(b.size()) != dim)
      throw InputError("pushforward: map dimension differs from the problem");
    for (const auto& row : A)
      if (static_cast<int>(row.size()) != dim) throw InputError("pushforward: matrix must be square");
    out.emplace_back(std::move(A), std::move(b));
  }
  return out;
}

template <typename T>
WeightedPoints<T> build_marginal(const ProblemSpec& spec, const std::vector<GeneratorSpec>& blocks,
                                 const WeightedPoints<T>* source) {
  const int d = problem_dim(spec);
  WeightedPoints<T> all;
  auto need_dim = [&](const Vec<Rational>& v, const std::string& what) {
    if (static_cast<int>(v.size()) != d)
      throw InputError(what + " has dimension " + std::to_string(v.size()) + ", expected " +
                       std::to_string(d));
  };
  for (const auto& g : blocks) {
    WeightedPoints<T> pts;
    if (g.kind == "disc") {
      auto c = parse_vector(g.get("center"));
      need_dim(c, "disc center");
      int count = std::stoi(g.get("count"));
      if (count < 1) throw InputError("disc count must be positive");
      Sampler s = g.get_or("sampler", "stratified") == "montecarlo" ? Sampler::MonteCarlo
                                                                    : Sampler::Stratified;
      pts = disc_samples<T>(c, parse_rational(g.get("radius")), count, s, spec.seed,
                            std::stoull(g.get_or("stream", "0")));
    } else if (g.kind == "lattice") {
      auto c = parse_vector(g.get("center"));
      need_dim(c, "lattice center");
      pts = lattice_points<T>(c, parse_rational(g.get("radius")), parse_rational(g.get("step")));
    } else if (g.kind == "segment") {
      auto a = parse_vector(g.get("from")), b = parse_vector(g.get("to"));
      need_dim(a, "segment start");
      need_dim(b, "segment end");
      int count = std::stoi(g.get("count"));
      if (count < 1) throw InputError("segment count must be positive");
      auto dens = g.get_or("density", "uniform") == "twin-tent" ? SegmentDensity::TwinTent
                                                                : SegmentDensity::Uniform;
      pts = segment_points<T>(a, b, count, dens);
    } else if (g.kind == "grid") {
      auto lo = parse_vector(g.get("lo")), hi = parse_vector(g.get("hi"));
      need_dim(lo, "grid lo");
      need_dim(hi, "grid hi");
      std::vector<int> counts;
      for (auto c : split(g.get("counts"), ',')) counts.push_back(std::stoi(std::string(c)));
      if (static_cast<int>(counts.size()) != d) throw InputError("grid counts dimension mismatch");
      pts = grid_points<T>(lo, hi, counts);
    } else if (g.kind == "csv") {
      pts = read_marginal_csv<T>(resolve_path(spec, g.get("path")), d);
    } else if (g.kind == "pushforward") {
      if (!source) throw InputError("pushforward needs a source marginal");
      auto maps = parse_maps(g, d);
      if (maps.size() != 1) throw InputError("a pushforward marginal takes exactly one matrix");
      pts = map_points(*source, maps[0].first, maps[0].second);
    } else {
      throw InputError("unknown generator '" + g.kind + "'");
    }
    if (g.has("reflect")) {
      int axis = std::stoi(g.get("reflect"));  // 1-based, like x_1
      if (axis < 1 || axis > d) throw InputError("reflect axis out of range");
      reflect_points(pts, axis - 1);
    }
    if (pts.points.empty()) throw InputError(g.kind + " generated no points");
    all.append(pts);
  }
  return all;
}

#define SUDAKOV_INSTANTIATE(T)                                                                    \
  template PolyhedralCost<T> cost_as<T>(const PolyhedralCost<Rational>&);                         \
  template WeightedPoints<T> parse_marginal_csv<T>(std::string_view, int);                        \
  template WeightedPoints<T> read_marginal_csv<T>(const std::string&, int);                       \
  template void write_marginal_csv<T>(std::ostream&, const WeightedPoints<T>&);                   \
  template std::vector<PlanEntry<T>> parse_plan_csv<T>(std::string_view, int, int);               \
  template std::vector<PlanEntry<T>> read_plan_csv<T>(const std::string&, int, int);              \
  template void write_plan_csv<T>(std::ostream&, const std::vector<PlanEntry<T>>&,                \
                                  const std::string&);                                            \
  template WeightedPoints<T> build_marginal<T>(const ProblemSpec&,                                \
                                               const std::vector<GeneratorSpec>&,                 \
                                               const WeightedPoints<T>*);

SUDAKOV_INSTANTIATE(double)
SUDAKOV_INSTANTIATE(Rational)

}  // namespace sudakov
