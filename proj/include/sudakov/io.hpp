#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>

#include "sudakov/generators.hpp"
#include "sudakov/ot_solver.hpp"

namespace sudakov {

/// Cost file: `dim <d>` then one `piece a_1 ... a_d b` line per affine piece.
/// `#` starts a comment. Numbers are decimals or p/q.
PolyhedralCost<Rational> parse_cost_text(std::string_view text);
PolyhedralCost<Rational> read_cost_file(const std::string& path);
std::string format_cost(const PolyhedralCost<Rational>& cost);

template <typename T>
PolyhedralCost<T> cost_as(const PolyhedralCost<Rational>& cost);

/// Marginal CSV rows `x_1,...,x_d,weight`; dim 0 infers it from the first row.
template <typename T>
WeightedPoints<T> parse_marginal_csv(std::string_view text, int dim = 0);
template <typename T>
WeightedPoints<T> read_marginal_csv(const std::string& path, int dim = 0);
template <typename T>
void write_marginal_csv(std::ostream& os, const WeightedPoints<T>& pts);

/// Plan CSV rows `i,j,mass` after an optional header line.
template <typename T>
std::vector<PlanEntry<T>> parse_plan_csv(std::string_view text, int m, int n);
template <typename T>
std::vector<PlanEntry<T>> read_plan_csv(const std::string& path, int m, int n);
template <typename T>
void write_plan_csv(std::ostream& os, const std::vector<PlanEntry<T>>& entries,
                    const std::string& header = "i,j,mass");

/// One generator or plan line: a kind followed by key=value parameters, kept
/// as written (keys may repeat, e.g. several `matrix=` maps).
struct GeneratorSpec {
  std::string kind;
  std::vector<std::pair<std::string, std::string>> params;

  bool has(const std::string& key) const;
  const std::string& get(const std::string& key) const;  // first value; InputError if absent
  std::string get_or(const std::string& key, const std::string& fallback) const;
  std::vector<std::string> all(const std::string& key) const;
  bool operator==(const GeneratorSpec& o) const { return kind == o.kind && params == o.params; }
};

struct ProblemSpec {
  std::string cost = "linf";  // preset name or cost file path
  int dim = 0;                // 0: taken from the cost file or the first generator
  Mode mode = Mode::Float;
  std::uint64_t seed = 0;
  std::string out = "out";
  std::vector<GeneratorSpec> mu;
  std::vector<GeneratorSpec> nu;
  GeneratorSpec plan{"solve", {}};
  bool refine = false;
  bool extract_map = false;
  bool verify = false;
  int resolution = 200;
  double slack = 0.05;
  std::string witness_radius = "1/1000";
  std::string base_dir;  // directory of the problem file; not printed

  bool operator==(const ProblemSpec& o) const;
};

ProblemSpec parse_problem_text(std::string_view text, const std::string& base_dir = "");
ProblemSpec parse_problem(const std::string& path);
std::string print_problem(const ProblemSpec& spec);

/// Path relative to the problem file unless absolute.
std::string resolve_path(const ProblemSpec& spec, const std::string& path);

bool is_preset(const std::string& name);
PolyhedralCost<Rational> build_cost(const ProblemSpec& spec);
int problem_dim(const ProblemSpec& spec);

/// Concatenates the blocks. `pushforward` blocks map `source` (required then).
template <typename T>
WeightedPoints<T> build_marginal(const ProblemSpec& spec, const std::vector<GeneratorSpec>& blocks,
                                 const WeightedPoints<T>* source = nullptr);

/// Affine maps of a `pushforward` line: every `matrix=` with the matching
/// `offset=` (zero when absent).
std::vector<std::pair<Mat<Rational>, Vec<Rational>>> parse_maps(const GeneratorSpec& g, int dim);

Vec<Rational> parse_vector(std::string_view text);
Mat<Rational> parse_matrix(std::string_view text);  // rows separated by ';'

std::string read_text_file(const std::string& path);

}  // namespace sudakov
