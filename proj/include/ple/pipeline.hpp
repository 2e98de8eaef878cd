#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ple/engine.hpp"
#include "ple/reflect.hpp"
#include "ple/surface.hpp"

namespace ple::pipeline {

// Shared settings for the batch subcommands. Exactly one backend is in
// effect; caps and budgets must be positive.
struct RunConfig {
  engine::EngineConfig engine{};
  std::string format = "text";  // text | json
  uint64_t seed = 0;            // reserved for sampling-based subcommands
  int jobs = 0;                 // worker threads; 0 = hardware concurrency
};

struct LoadedFile {
  std::string path;
  surface::Program prog;
  reflect::Module mod;
};

// Parse + sort-check + reflect one file. Throws the frontend/reflection
// error as-is; callers map it to exit code 3.
LoadedFile load_file(const std::string& path);

// "builtin", "exec:<command>", or bare "exec:"/"exec" which takes the
// command from $PLE_SOLVER. Throws InputError on anything else.
SolverBackend parse_backend(const std::string& spec);

// Exit codes: 0 all proved/passed, 1 some unproved fixpoint or failed
// script, 2 some aborted/unknown, 3 input error. The worst code wins.
int run_check(const std::vector<std::string>& files, std::ostream& out,
              std::ostream& err);
int run_ple(const std::vector<std::string>& files, const RunConfig& cfg,
            std::ostream& out, std::ostream& err);
int run_prove(const std::vector<std::string>& files, const RunConfig& cfg,
              std::ostream& out, std::ostream& err);
int run_smt_dump(const std::string& file, const std::string& goal,
                 std::ostream& out, std::ostream& err);
int run_trace(const std::string& file, const std::string& goal,
              const RunConfig& cfg, std::ostream& out, std::ostream& err);

}  // namespace ple::pipeline
