#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ple/errors.hpp"
#include "ple/pipeline.hpp"
#include "ple/smt.hpp"

using namespace ple;

int main(int argc, char** argv) {
  CLI::App app{
      "plec: fixpoint-unfolding prover and equational proof-script checker"};
  app.require_subcommand(1);

  pipeline::RunConfig cfg;
  std::string backend = "builtin";
  std::vector<std::string> files;
  std::string file;
  std::string goal;

  auto add_run_flags = [&](CLI::App* c) {
    c->add_option("--backend", backend,
                  "builtin or exec:<command> (SMT-LIB2 over stdio; bare "
                  "exec: takes the command from $PLE_SOLVER)");
    c->add_option("--max-iters", cfg.engine.max_iters,
                  "unfolding iteration cap")
        ->check(CLI::PositiveNumber);
    c->add_option("--max-instances", cfg.engine.max_instances, "instance cap")
        ->check(CLI::PositiveNumber);
    c->add_option("--smt-budget", cfg.engine.smt.budget,
                  "solver step budget per validity check")
        ->check(CLI::PositiveNumber);
    c->add_flag("--alpha,!--no-alpha", cfg.engine.lambdas.enable_alpha,
                "emit lambda alpha-renaming instances (default on)");
    c->add_flag("--beta,!--no-beta", cfg.engine.lambdas.enable_beta,
                "emit lambda beta-reduction instances (default on)");
    c->add_option("--lambda-pool", cfg.engine.lambdas.pool,
                  "alpha-instance binder pool size")
        ->check(CLI::PositiveNumber);
    c->add_option("--seed", cfg.seed, "rng seed (reserved for sampling)");
    c->add_option("--format", cfg.format, "text or json")
        ->check(CLI::IsMember({"text", "json"}));
    c->add_option("--jobs", cfg.jobs, "worker threads (0 = auto)")
        ->check(CLI::NonNegativeNumber);
  };

  auto* check = app.add_subcommand("check", "parse and sort-check files");
  check->add_option("files", files, "input files")->required();

  auto* ple = app.add_subcommand("ple", "prove every ple-mode goal");
  ple->add_option("files", files, "input files")->required();
  add_run_flags(ple);

  auto* prove = app.add_subcommand(
      "prove", "check every proof script, then cross-check passing goals "
               "with the fixpoint engine");
  prove->add_option("files", files, "input files")->required();
  add_run_flags(prove);

  auto* dump = app.add_subcommand(
      "smt-dump", "emit the SMT-LIB2 script for one goal's VC");
  dump->add_option("file", file, "input file")->required();
  dump->add_option("--goal", goal, "goal name")->required();

  auto* trace = app.add_subcommand(
      "trace", "run one goal and emit its JSON unfolding trace");
  trace->add_option("file", file, "input file")->required();
  trace->add_option("--goal", goal, "goal name")->required();
  add_run_flags(trace);

  app.add_subcommand("smt-server",
                     "read one SMT-LIB2 script on stdin, print "
                     "sat/unsat/unknown on stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 3;
  }

  try {
    cfg.engine.backend = pipeline::parse_backend(backend);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }

  if (app.got_subcommand("check"))
    return pipeline::run_check(files, std::cout, std::cerr);
  if (app.got_subcommand("ple"))
    return pipeline::run_ple(files, cfg, std::cout, std::cerr);
  if (app.got_subcommand("prove"))
    return pipeline::run_prove(files, cfg, std::cout, std::cerr);
  if (app.got_subcommand("smt-dump"))
    return pipeline::run_smt_dump(file, goal, std::cout, std::cerr);
  if (app.got_subcommand("trace"))
    return pipeline::run_trace(file, goal, cfg, std::cout, std::cerr);
  if (app.got_subcommand("smt-server"))
    return smt_server_run(std::cin, std::cout);
  (void)check;
  (void)ple;
  (void)prove;
  (void)dump;
  (void)trace;
  return 3;
}
