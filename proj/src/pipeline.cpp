#include "ple/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "ple/eqproof.hpp"
#include "ple/errors.hpp"

namespace ple::pipeline {

namespace {

using nlohmann::json;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int status_code(engine::PleStatus s) {
  switch (s) {
    case engine::PleStatus::Proved:
      return 0;
    case engine::PleStatus::UnprovedFixpoint:
      return 1;
    default:
      return 2;
  }
}

const char* status_text(engine::PleStatus s) {
  switch (s) {
    case engine::PleStatus::Proved:
      return "proved";
    case engine::PleStatus::UnprovedFixpoint:
      return "unproved-fixpoint";
    default:
      return "aborted";
  }
}

// Runs work(0..n-1) on a pool and calls emit(i) in index order as results
// become ready, so output is deterministic while goals still overlap.
template <class Work, class Emit>
void ordered_run(size_t n, int jobs, Work work, Emit emit) {
  if (n == 0) return;
  unsigned hw = std::thread::hardware_concurrency();
  size_t nw = jobs > 0 ? static_cast<size_t>(jobs) : (hw ? hw : 4);
  nw = std::min(nw, n);
  if (nw <= 1) {
    for (size_t i = 0; i < n; i++) {
      work(i);
      emit(i);
    }
    return;
  }
  std::mutex m;
  std::condition_variable cv;
  std::vector<char> done(n, 0);
  std::atomic<size_t> next{0};
  std::vector<std::thread> ws;
  ws.reserve(nw);
  for (size_t w = 0; w < nw; w++)
    ws.emplace_back([&] {
      for (size_t i; (i = next.fetch_add(1)) < n;) {
        work(i);
        {
          std::lock_guard<std::mutex> lk(m);
          done[i] = 1;
        }
        cv.notify_all();
      }
    });
  for (size_t i = 0; i < n; i++) {
    std::unique_lock<std::mutex> lk(m);
    cv.wait(lk, [&] { return done[i] != 0; });
    lk.unlock();
    emit(i);
  }
  for (auto& t : ws) t.join();
}

std::vector<LoadedFile> load_all(const std::vector<std::string>& files,
                                 std::ostream& err, int& code) {
  std::vector<LoadedFile> loaded;
  loaded.reserve(files.size());
  for (const auto& p : files) {
    try {
      loaded.push_back(load_file(p));
    } catch (const Error& e) {
      err << p << ": error: " << e.what() << "\n";
      code = 3;
    }
  }
  return loaded;
}

const reflect::EmbeddedGoal* find_goal(const reflect::Module& mod,
                                       const std::string& name) {
  for (const auto& g : mod.goals)
    if (g.name == name) return &g;
  return nullptr;
}

}  // namespace

LoadedFile load_file(const std::string& path) {
  LoadedFile lf;
  lf.path = path;
  lf.prog = surface::sort_check(surface::parse_program(read_file(path)));
  lf.mod = reflect::reflect_program(lf.prog);
  return lf;
}

SolverBackend parse_backend(const std::string& spec) {
  if (spec.empty() || spec == "builtin") return SolverBackend::builtin();
  if (spec == "exec" || spec.rfind("exec:", 0) == 0) {
    std::string cmd = spec == "exec" ? "" : spec.substr(5);
    if (cmd.empty()) {
      const char* env = std::getenv("PLE_SOLVER");
      if (env != nullptr) cmd = env;
    }
    if (cmd.empty())
      throw InputError(
          "--backend exec: needs a command (or set PLE_SOLVER)");
    return SolverBackend::external(cmd);
  }
  throw InputError("unknown backend '" + spec +
                   "' (expected builtin or exec:<command>)");
}

int run_check(const std::vector<std::string>& files, std::ostream& out,
              std::ostream& err) {
  int code = 0;
  for (const auto& p : files) {
    try {
      LoadedFile lf = load_file(p);
      for (const auto& w : lf.mod.warnings)
        err << p << ": warning: " << w << "\n";
      out << p << ": ok (defs=" << lf.mod.env.def_order().size()
          << " goals=" << lf.mod.goals.size()
          << " proofs=" << lf.mod.proofs.size() << ")\n";
    } catch (const Error& e) {
      err << p << ": error: " << e.what() << "\n";
      code = 3;
    }
  }
  return code;
}

int run_ple(const std::vector<std::string>& files, const RunConfig& cfg,
            std::ostream& out, std::ostream& err) {
  int code = 0;
  std::vector<LoadedFile> loaded = load_all(files, err, code);

  struct Job {
    const LoadedFile* f = nullptr;
    const reflect::EmbeddedGoal* g = nullptr;
    engine::PleOutcome result;
    std::string error;
    int code = 0;
  };
  std::vector<Job> jobs;
  for (const auto& lf : loaded)
    for (const auto& g : lf.mod.goals)
      if (g.mode == surface::GoalMode::Ple) {
        Job j;
        j.f = &lf;
        j.g = &g;
        jobs.push_back(std::move(j));
      }

  json entries = json::array();
  int proved = 0, unproved = 0, aborted = 0, failures = 0;
  const bool text = cfg.format != "json";

  ordered_run(
      jobs.size(), cfg.jobs,
      [&](size_t i) {
        Job& j = jobs[i];
        try {
          Term goal = reflect::rel_term(j.g->rel, j.g->lhs, j.g->rhs);
          j.result =
              engine::ple_query(j.f->mod.env, j.g->hyps, goal, cfg.engine);
          j.code = status_code(j.result.status);
        } catch (const SolverError& e) {
          j.error = e.what();
          j.code = 2;
        } catch (const Error& e) {
          j.error = e.what();
          j.code = 3;
        }
      },
      [&](size_t i) {
        Job& j = jobs[i];
        code = std::max(code, j.code);
        if (!j.error.empty()) {
          failures++;
          err << j.f->path << ": " << j.g->name << " error: " << j.error
              << "\n";
          if (text)
            out << j.f->path << ": " << j.g->name << " error\n";
          else
            entries.push_back({{"file", j.f->path},
                               {"goal", j.g->name},
                               {"status", "error"},
                               {"message", j.error}});
          return;
        }
        const auto& r = j.result;
        if (r.status == engine::PleStatus::Proved) proved++;
        if (r.status == engine::PleStatus::UnprovedFixpoint) unproved++;
        if (r.status == engine::PleStatus::Aborted) aborted++;
        if (text) {
          out << j.f->path << ": " << j.g->name << " " << status_text(r.status);
          if (!r.abort_reason.empty()) out << " (" << r.abort_reason << ")";
          out << " (iterations=" << r.iterations
              << " instances=" << r.instance_count << ")\n";
        } else {
          json e = {{"file", j.f->path},
                    {"goal", j.g->name},
                    {"status", status_text(r.status)},
                    {"iterations", r.iterations},
                    {"instances", r.instance_count}};
          if (!r.abort_reason.empty()) e["abort_reason"] = r.abort_reason;
          entries.push_back(std::move(e));
        }
      });

  if (text) {
    out << "summary: proved=" << proved << " unproved=" << unproved
        << " aborted=" << aborted << " errors=" << failures << "\n";
  } else {
    json top = {{"version", 1},
                {"command", "ple"},
                {"results", std::move(entries)},
                {"summary",
                 {{"proved", proved},
                  {"unproved", unproved},
                  {"aborted", aborted},
                  {"errors", failures}}}};
    out << top.dump(2) << "\n";
  }
  return code;
}

int run_prove(const std::vector<std::string>& files, const RunConfig& cfg,
              std::ostream& out, std::ostream& err) {
  int code = 0;
  std::vector<LoadedFile> loaded = load_all(files, err, code);

  struct Job {
    const LoadedFile* f = nullptr;
    const reflect::EmbeddedProof* p = nullptr;
    const reflect::EmbeddedGoal* g = nullptr;
    eqproof::ProofReport report;
    engine::PleOutcome cross;
    bool crossed = false;
    std::string error;
    int code = 0;
  };
  std::vector<Job> jobs;
  for (const auto& lf : loaded) {
    for (const auto& p : lf.mod.proofs) {
      const auto* g = find_goal(lf.mod, p.goal);
      if (g == nullptr) {
        err << lf.path << ": error: proof '" << p.name
            << "' names unknown goal '" << p.goal << "'\n";
        code = 3;
        continue;
      }
      Job j;
      j.f = &lf;
      j.p = &p;
      j.g = g;
      jobs.push_back(std::move(j));
    }
    for (const auto& g : lf.mod.goals) {
      if (g.mode != surface::GoalMode::Script) continue;
      bool has = std::any_of(lf.mod.proofs.begin(), lf.mod.proofs.end(),
                             [&](const auto& p) { return p.goal == g.name; });
      if (!has)
        err << lf.path << ": warning: script goal '" << g.name
            << "' has no proof\n";
    }
  }

  json entries = json::array();
  int passed = 0, failed = 0, failures = 0;
  const bool text = cfg.format != "json";

  ordered_run(
      jobs.size(), cfg.jobs,
      [&](size_t i) {
        Job& j = jobs[i];
        try {
          j.report = eqproof::check_proof(j.f->mod.env, *j.g, *j.p, cfg.engine);
          if (j.report.passed) {
            // Completeness cross-check: the fixpoint engine must prove any
            // goal carried by a passing script.
            j.cross = eqproof::proof_to_ple_check(j.f->mod.env, *j.g,
                                                  cfg.engine);
            j.crossed = true;
            j.code = status_code(j.cross.status);
          } else {
            j.code = 1;
          }
        } catch (const SolverError& e) {
          j.error = e.what();
          j.code = 2;
        } catch (const Error& e) {
          j.error = e.what();
          j.code = 3;
        }
      },
      [&](size_t i) {
        Job& j = jobs[i];
        code = std::max(code, j.code);
        if (!j.error.empty()) {
          failures++;
          err << j.f->path << ": " << j.p->name << " error: " << j.error
              << "\n";
          if (text)
            out << j.f->path << ": " << j.p->name << " error\n";
          else
            entries.push_back({{"file", j.f->path},
                               {"proof", j.p->name},
                               {"goal", j.g->name},
                               {"status", "error"},
                               {"message", j.error}});
          return;
        }
        const auto& r = j.report;
        int first_bad = -1;
        for (size_t k = 0; k < r.steps.size(); k++)
          if (!r.steps[k].passed) {
            first_bad = static_cast<int>(k);
            break;
          }
        if (r.passed)
          passed++;
        else
          failed++;
        if (text) {
          out << j.f->path << ": " << j.p->name;
          if (r.passed) {
            out << " passed (steps=" << r.steps.size() << ")"
                << " cross-check=" << status_text(j.cross.status) << "\n";
          } else if (!r.error.empty()) {
            out << " failed (" << r.error << ")\n";
          } else {
            out << " failed (step=" << (first_bad + 1) << " of "
                << r.steps.size() << ")\n";
            err << j.f->path << ": " << j.p->name << " step "
                << (first_bad + 1) << " unproved vc:\n"
                << r.steps[first_bad].vc << "\n";
          }
        } else {
          json steps = json::array();
          for (const auto& s : r.steps)
            steps.push_back({{"index", s.index},
                             {"passed", s.passed},
                             {"assumed", s.assumed},
                             {"phi_size", s.phi_size}});
          json e = {{"file", j.f->path},
                    {"proof", j.p->name},
                    {"goal", j.g->name},
                    {"passed", r.passed},
                    {"steps", std::move(steps)}};
          if (j.crossed) e["cross_check"] = status_text(j.cross.status);
          if (!r.error.empty()) e["error"] = r.error;
          if (first_bad >= 0) {
            e["failed_step"] = first_bad;
            e["vc"] = r.steps[first_bad].vc;
          }
          entries.push_back(std::move(e));
        }
      });

  if (text) {
    out << "summary: passed=" << passed << " failed=" << failed
        << " errors=" << failures << "\n";
  } else {
    json top = {{"version", 1},
                {"command", "prove"},
                {"results", std::move(entries)},
                {"summary",
                 {{"passed", passed},
                  {"failed", failed},
                  {"errors", failures}}}};
    out << top.dump(2) << "\n";
  }
  return code;
}

int run_smt_dump(const std::string& file, const std::string& goal,
                 std::ostream& out, std::ostream& err) {
  try {
    LoadedFile lf = load_file(file);
    const auto* g = find_goal(lf.mod, goal);
    if (g == nullptr) throw InputError("unknown goal '" + goal + "'");
    out << emit_smtlib(lf.mod.env, g->hyps,
                       reflect::rel_term(g->rel, g->lhs, g->rhs));
    return 0;
  } catch (const Error& e) {
    err << file << ": error: " << e.what() << "\n";
    return 3;
  }
}

int run_trace(const std::string& file, const std::string& goal,
              const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    LoadedFile lf = load_file(file);
    const auto* g = find_goal(lf.mod, goal);
    if (g == nullptr) throw InputError("unknown goal '" + goal + "'");
    auto outcome = engine::ple_query(
        lf.mod.env, g->hyps, reflect::rel_term(g->rel, g->lhs, g->rhs),
        cfg.engine);
    out << engine::trace_json(lf.mod.env, outcome) << "\n";
    return status_code(outcome.status);
  } catch (const SolverError& e) {
    err << file << ": error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    err << file << ": error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace ple::pipeline
