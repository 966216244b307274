#include <iostream>

#include "CLI11.hpp"
#include "sudakov/pipeline.hpp"

using namespace sudakov;

int main(int argc, char** argv) {
  CLI::App app{"Exact-arithmetic decomposition of polyhedral-cost optimal transport"};
  std::string command, problem, mode;
  Overrides ov;
  std::uint64_t seed = 0;
  std::string out, witness;
  int resolution = 0;
  double slack = 0;

  app.add_option("command", command, "solve | decompose | refine | extract-map | verify | render")
      ->required();
  app.add_option("problem", problem, "problem file")->required();
  auto* o_mode = app.add_option("--mode", mode, "rational | float")
                     ->check(CLI::IsMember({"rational", "float"}));
  auto* o_seed = app.add_option("--seed", seed, "sampling seed");
  auto* o_out = app.add_option("--out", out, "output directory");
  auto* o_res = app.add_option("--resolution", resolution, "grid cells per axis for the area estimate")
                    ->check(CLI::PositiveNumber);
  auto* o_slack = app.add_option("--slack", slack, "relative slack of the area estimate")
                      ->check(CLI::Range(0.0, 0.999999));
  auto* o_wit = app.add_option("--witness-radius", witness, "witness step for regular points (p/q)");
  bool quiet = false;
  app.add_flag("-q,--quiet", quiet, "no summary on stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitInput;
  }

  try {
    Command cmd = parse_command(command);
    ProblemSpec spec = parse_problem(problem);
    if (*o_mode) ov.mode = mode == "rational" ? Mode::Rational : Mode::Float;
    if (*o_seed) ov.seed = seed;
    if (*o_out) ov.out = out;
    if (*o_res) ov.resolution = resolution;
    if (*o_slack) ov.slack = slack;
    if (*o_wit) ov.witness_radius = witness;
    apply_overrides(spec, ov);

    RunResult result = run_pipeline(cmd, spec);
    write_outputs(result, spec.out);
    if (!quiet) {
      std::cout << result.summary;
      std::cout << "wrote " << result.files.size() << " files to " << spec.out << "\n";
    }
    return result.status;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
}
