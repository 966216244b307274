#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"
#include "sudakov/pipeline.hpp"
#include "test_support.hpp"

using namespace sudakov;
using Q = Rational;

namespace {

const std::string kProblems = std::string(SUDAKOV_SOURCE_DIR) + "/problems/";

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("sudakov_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream(p) << text;
}

int count_lines(const std::string& s) { return static_cast<int>(std::count(s.begin(), s.end(), '\n')); }

template <typename F>
std::pair<int, int> parse_error_at(F&& f) {
  try {
    f();
  } catch (const ParseError& e) {
    return {e.line(), e.column()};
  }
  return {0, 0};
}

}  // namespace

TEST_CASE("cost files") {
  auto c = parse_cost_text("# l1 in the plane\ndim 2\npiece 1 1 0\npiece 1 -1 0\npiece -1 1 0\npiece -1 -1 0\n");
  CHECK(c.dim == 2);
  CHECK(c.size() == 4);
  CHECK(evaluate_cost(c, Vec<Q>{Q(3), Q(-2)}) == Q(5));
  auto again = parse_cost_text(format_cost(c));
  CHECK(again.a == c.a);
  CHECK(again.b == c.b);
  auto tilted = parse_cost_text("dim 1\npiece 1/3 0.25\npiece -2 0\n");
  CHECK(tilted.b[0] == Q(1, 4));

  CHECK(parse_error_at([] { parse_cost_text("dim 2\npiece 1 3/0 0\n"); }) == std::pair{2, 9});
  CHECK(parse_error_at([] { parse_cost_text("dim 2\npiece 1 0\n"); }) == std::pair{2, 1});
  CHECK(parse_error_at([] { parse_cost_text("piece 1 0\n"); }) == std::pair{1, 1});
  CHECK(parse_error_at([] { parse_cost_text("dim 1\n  slope 1 0\n"); }) == std::pair{2, 3});
  CHECK(parse_error_at([] { parse_cost_text("dim 2\n"); }).first == 1);
  CHECK(parse_error_at([] { parse_cost_text("dim 0\n"); }) == std::pair{1, 5});
  CHECK_THROWS_AS(format_cost(preset_cost<Q>("quadratic", 2)), InputError);
}

TEST_CASE("marginal and plan CSV") {
  auto pts = parse_marginal_csv<Q>("x1,x2,weight\n0,1/2,1\n# note\n1.5,-2,3\n");
  REQUIRE(pts.points.size() == 2);
  CHECK(pts.points[1] == Vec<Q>{Q(3, 2), Q(-2)});
  CHECK(pts.weights[1] == Q(3));
  std::ostringstream os;
  write_marginal_csv(os, pts);
  auto back = parse_marginal_csv<Q>(os.str(), 2);
  CHECK(back.points == pts.points);
  CHECK(back.weights == pts.weights);

  CHECK(parse_error_at([] { parse_marginal_csv<Q>("0,0,1\n1,1/0,1\n"); }) == std::pair{2, 3});
  CHECK(parse_error_at([] { parse_marginal_csv<Q>("0,0,1\n1,1\n"); }).first == 2);
  CHECK(parse_error_at([] { parse_marginal_csv<Q>("0,0,-1\n"); }) == std::pair{1, 5});
  CHECK_THROWS_AS(parse_marginal_csv<double>("x,w\n"), InputError);

  auto plan = parse_plan_csv<Q>("i,j,mass\n0,1,1/4\n1,0,3/4\n", 2, 2);
  REQUIRE(plan.size() == 2);
  CHECK(plan[1].mass == Q(3, 4));
  std::ostringstream ps;
  write_plan_csv(ps, plan);
  CHECK(ps.str() == "i,j,mass\n0,1,1/4\n1,0,3/4\n");
  CHECK(parse_error_at([] { parse_plan_csv<Q>("0,2,1\n", 2, 2); }) == std::pair{1, 3});
}

TEST_CASE("problem files") {
  SUBCASE("minimal spec with defaults") {
    auto s = parse_problem_text("cost linf\nmu csv path=a.csv\nnu csv path=b.csv\n", "/data");
    CHECK(s.mode == Mode::Float);
    CHECK(s.seed == 0);
    CHECK(s.plan.kind == "solve");
    CHECK_FALSE(s.refine);
    CHECK(resolve_path(s, "a.csv") == "/data/a.csv");
    CHECK(resolve_path(s, "/abs/a.csv") == "/abs/a.csv");
  }

  SUBCASE("errors carry their location") {
    auto at = [](const std::string& text) { return parse_error_at([&] { parse_problem_text(text); }); };
    CHECK(at("cost linf\nmodee float\n") == std::pair{2, 1});
    CHECK(at("mode fast\n") == std::pair{1, 6});
    CHECK(at("mu disc center=0,0 radius=1 count=4 colour=red\n") == std::pair{1, 37});
    CHECK(at("mu disc center=0,0 radius=1/0 count=4\n") == std::pair{1, 27});
    CHECK(at("mu disc center=0,0 count=4\n") == std::pair{1, 4});
    CHECK(at("mu pushforward matrix=1,0;0,1\n") == std::pair{1, 4});
    CHECK(at("mu grid lo=0 hi=1 counts=3\nnu grid lo=0 hi=1 counts=3\nseed 1\nseed 2\n") == std::pair{4, 1});
    CHECK(at("mu grid lo=0 hi=1 counts=3\n").first == 1);  // no nu
    CHECK(at("refine maybe\n") == std::pair{1, 8});
    CHECK(at("mu segment from=0 to=1 count=3 density=flat\n") == std::pair{1, 40});
  }

  SUBCASE("print then parse is the identity") {
    std::vector<std::string> files{"second_marginal.prob", "second_marginal_plus.prob",
                                   "second_marginal_averaged.prob", "twin_tent.prob", "two_by_two.prob",
                                   "box3d.prob"};
    for (const auto& f : files) {
      INFO(f);
      auto s = parse_problem(kProblems + f);
      auto t = parse_problem_text(print_problem(s), s.base_dir);
      CHECK(t == s);
      CHECK(print_problem(t) == print_problem(s));
    }
    // random specs
    std::mt19937_64 rng(3);
    auto q = [&] { return format_rational(testing_support::rand_rational(rng, 9, 5)); };
    auto pos = [&] { return std::to_string(std::uniform_int_distribution<int>(1, 50)(rng)); };
    for (int trial = 0; trial < 50; ++trial) {
      ProblemSpec s;
      s.cost = trial % 2 ? "l1" : "costs/c.txt";
      s.dim = 2;
      s.mode = trial % 3 ? Mode::Float : Mode::Rational;
      s.seed = rng() >> 1;
      s.out = "out/t" + std::to_string(trial);
      s.mu.push_back({"disc", {{"center", q() + "," + q()}, {"radius", "1/" + pos()}, {"count", pos()},
                               {"sampler", trial % 2 ? "montecarlo" : "stratified"}, {"stream", pos()}}});
      if (trial % 4 == 0) s.mu.push_back({"lattice", {{"center", q() + "," + q()}, {"radius", "2"}, {"step", "1/4"}, {"reflect", "1"}}});
      s.nu.push_back({"segment", {{"from", q() + "," + q()}, {"to", q() + "," + q()}, {"count", pos()}, {"density", "twin-tent"}}});
      if (trial % 5 == 0) s.plan = {"pushforward", {{"matrix", "0,0;1,1"}, {"matrix", "0,0;-1,1"}}};
      s.refine = trial % 2;
      s.extract_map = trial % 3 == 0;
      s.verify = trial % 5 == 1;
      s.resolution = 10 + trial;
      s.slack = 0.01 * (trial % 7);
      s.witness_radius = "1/" + pos();
      auto t = parse_problem_text(print_problem(s));
      CHECK(t == s);
    }
  }
}

TEST_CASE("generator specs reproduce the second-marginal example") {
  auto spec = parse_problem(kProblems + "second_marginal.prob");
  auto mu = build_marginal<double>(spec, spec.mu);
  auto nu = build_marginal<double>(spec, spec.nu, &mu);
  // independent construction: the right disc, its mirror first
  auto right = disc_samples<double>({Q(2), Q(0)}, Q(1), 576, Sampler::Stratified, 0, 1);
  auto ex = testing_support::second_marginal(right);
  auto inst = make_instance<double>(preset_cost<double>("linf", 2), mu.points, mu.weights, nu.points, nu.weights);
  CHECK(inst.mu_points == ex.inst.mu_points);
  CHECK(inst.mu_weights == ex.inst.mu_weights);
  CHECK(inst.nu_points == ex.inst.nu_points);
  CHECK(inst.nu_weights == ex.inst.nu_weights);
  for (const auto& p : mu.points) {
    double r2 = (std::fabs(p[0]) - 2) * (std::fabs(p[0]) - 2) + p[1] * p[1];
    CHECK(r2 <= 1.0);
  }

  auto tent = parse_problem(kProblems + "twin_tent.prob");
  auto seg = build_marginal<Q>(tent, tent.nu);
  REQUIRE(seg.points.size() == 160);
  // triangular weights peaking at heights +-2, vanishing at 0 and +-4
  Q total = 0;
  for (const auto& w : seg.weights) total += w;
  for (std::size_t k = 0; k < seg.points.size(); ++k) {
    CHECK(seg.points[k][0] == 0);
    Q y = seg.points[k][1];
    Q ay = y < 0 ? Q(-y) : y;
    Q dev = ay - 2 < 0 ? Q(2 - ay) : Q(ay - 2);
    CHECK(seg.weights[k] / total == (2 - dev) / 8 * Q(8, 160));
  }
}

TEST_CASE("pipeline commands") {
  SUBCASE("solve on a 2x2 instance") {
    auto spec = parse_problem(kProblems + "two_by_two.prob");
    auto r = run_pipeline(Command::Solve, spec);
    CHECK(r.status == kExitOk);
    const auto& csv = r.files.at("plan.csv");
    CHECK(count_lines(csv) == 3);  // header + 2 entries
    auto entries = parse_plan_csv<Q>(csv, 2, 2);
    CHECK(entries.size() == 2);
    CHECK(r.files.at("plan.json").find("\"value\": \"3/2\"") != std::string::npos);
  }

  SUBCASE("decompose reports two full-dimensional classes") {
    auto spec = parse_problem(kProblems + "second_marginal_plus.prob");
    auto r = run_pipeline(Command::Decompose, spec);
    const auto& js = r.files.at("partition.json");
    std::size_t pos = 0;
    int h2 = 0;
    while ((pos = js.find("\"h\": 2", pos)) != std::string::npos) {
      ++h2;
      ++pos;
    }
    CHECK(h2 == 2);
    CHECK(js.find("\"h\": 1") == std::string::npos);
  }

  SUBCASE("render needs the plane") {
    auto spec = parse_problem(kProblems + "box3d.prob");
    CHECK_THROWS_WITH_AS(run_pipeline(Command::Render, spec), doctest::Contains("dimension 2 only"), InputError);
    CHECK_THROWS_AS(parse_command("draw"), InputError);
  }

  SUBCASE("reports are byte-identical across runs") {
    for (const char* f : {"second_marginal.prob", "second_marginal_averaged.prob"}) {
      auto spec = parse_problem(kProblems + f);
      auto a = run_pipeline(Command::Render, spec);
      auto b = run_pipeline(Command::Render, spec);
      CHECK(a.files == b.files);
      spec.verify = true;
      auto v1 = run_pipeline(Command::Verify, spec);
      auto v2 = run_pipeline(Command::Verify, spec);
      CHECK(v1.files == v2.files);
      CHECK(v1.status == kExitOk);
    }
    // the seed changes the sample
    auto spec = parse_problem(kProblems + "twin_tent.prob");
    auto a = run_pipeline(Command::Solve, spec);
    Overrides o;
    o.seed = 8;
    apply_overrides(spec, o);
    auto b = run_pipeline(Command::Solve, spec);
    CHECK(a.files.at("plan.csv") != b.files.at("plan.csv"));
    CHECK(b.files.at("plan.json").find("\"seed\": 8") != std::string::npos);
  }

  SUBCASE("a suboptimal plan fails verification") {
    auto dir = scratch("swap");
    write_file(dir / "mu.csv", "0,0,1\n1,0,1\n");
    write_file(dir / "nu.csv", "0,1,1\n1,2,1\n");
    write_file(dir / "swap.csv", "i,j,mass\n0,1,1\n1,0,1\n");
    write_file(dir / "p.prob", "cost l1\nmode rational\nmu csv path=mu.csv\nnu csv path=nu.csv\nplan csv path=swap.csv\n");
    auto spec = parse_problem((dir / "p.prob").string());
    auto r = run_pipeline(Command::Verify, spec);
    CHECK(r.status == kExitInvariant);
    CHECK(r.files.at("verify.json").find("\"passed\": false") != std::string::npos);
    CHECK(r.summary.find("FAILED duality gap") != std::string::npos);

    write_file(dir / "half.csv", "0,0,1\n");
    write_file(dir / "q.prob", "cost l1\nmu csv path=mu.csv\nnu csv path=nu.csv\nplan csv path=half.csv\n");
    CHECK_THROWS_AS(run_pipeline(Command::Solve, parse_problem((dir / "q.prob").string())), InputError);
    CHECK_THROWS_AS(parse_problem((dir / "missing.prob").string()), InputError);
  }

  SUBCASE("outputs land in the out directory") {
    auto dir = scratch("out");
    auto spec = parse_problem(kProblems + "two_by_two.prob");
    auto r = run_pipeline(Command::ExtractMap, spec);
    write_outputs(r, (dir / "run").string());
    for (const char* f : {"plan.csv", "plan.json", "partition.json", "map.csv", "map.json", "problem.txt"})
      CHECK(std::filesystem::exists(dir / "run" / f));
    std::ifstream in(dir / "run" / "map.csv");
    std::string header;
    std::getline(in, header);
    CHECK(header == "source_index,target_index,mass");
  }
}
