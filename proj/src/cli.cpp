#include "ictmc/cli.hpp"

#include <chrono>
#include <cstdio>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "ictmc/ergodicity.hpp"
#include "ictmc/kernels.hpp"
#include "ictmc/model_io.hpp"
#include "ictmc/selftest.hpp"
#include "ictmc/semigroup.hpp"

namespace ictmc::cli {
namespace {

using Json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string join(const Gamble& g) {
  std::string out;
  for (std::size_t i = 0; i < g.size(); ++i) out += (i ? " " : "") + num(g[i]);
  return out;
}

std::string join_states(const StateSpace& states, const StateSet& set) {
  std::string out;
  for (std::size_t i = 0; i < set.size(); ++i)
    if (set[i]) out += (out.empty() ? "" : " ") + states.label(i);
  return out.empty() ? "(none)" : out;
}

Json state_list(const StateSpace& states, const StateSet& set) {
  Json out = Json::array();
  for (std::size_t i = 0; i < set.size(); ++i)
    if (set[i]) out.push_back(states.label(i));
  return out;
}

Json gamble_json(const Gamble& g) {
  Json out = Json::array();
  for (double v : g.values()) out.push_back(v);
  return out;
}

// key: value lines followed by a one-line JSON block.
class Report {
 public:
  Report(std::ostream& out, bool timing) : out_(out), timing_(timing), start_(Clock::now()) {}

  void line(const std::string& key, const std::string& value) {
    out_ << key << ": " << value << "\n";
  }
  Json& machine() { return machine_; }

  void finish() {
    if (timing_) {
      const double ms = std::chrono::duration<double, std::milli>(Clock::now() - start_).count();
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.3f", ms);
      line("wall_time_ms", buf);
      machine_["wall_time_ms"] = ms;
    }
    out_ << "--- machine ---\n" << machine_.dump() << "\n";
  }

 private:
  std::ostream& out_;
  bool timing_;
  Clock::time_point start_;
  Json machine_;
};

struct Loaded {
  LowerRateModel model;
  std::string digest;
};

Loaded load(const std::string& path) {
  LowerRateModel model = load_model(path);
  std::string digest = model_digest(model);
  return {std::move(model), std::move(digest)};
}

void header(Report& r, const char* command, const std::string& path, const Loaded& m) {
  r.line("command", command);
  r.line("model", path);
  r.line("digest", m.digest);
  r.line("kind", to_string(m.model.kind()));
  r.line("states", std::to_string(m.model.size()));
  r.machine()["command"] = command;
  r.machine()["model"] = path;
  r.machine()["digest"] = m.digest;
  r.machine()["kind"] = to_string(m.model.kind());
  r.machine()["states"] = m.model.states().labels();
}

Gamble gamble_arg(const std::vector<double>& values, const LowerRateModel& model) {
  if (values.size() != model.size())
    throw DimensionError("--f has " + std::to_string(values.size()) + " values but the model has " +
                         std::to_string(model.size()) + " states");
  return Gamble(values);
}

int cmd_check(const std::string& path, bool timing, std::ostream& out) {
  const Loaded m = load(path);
  Report r(out, timing);
  header(r, "check", path, m);
  const ErgodicityReport rep = decide_ergodic(m.model);
  const StateSpace& s = m.model.states();
  r.line("verdict", rep.ergodic ? "ergodic" : "not ergodic");
  r.line("top_class", join_states(s, rep.top_class));
  Json& j = r.machine();
  j["ergodic"] = rep.ergodic;
  j["top_class"] = state_list(s, rep.top_class);
  if (rep.failure == ErgodicityFailure::top_class_empty) {
    const auto [y, x] = *rep.unreachable_pair;
    r.line("witness", "top class empty");
    r.line("unreachable", s.label(y) + " cannot reach " + s.label(x));
    j["witness"] = "top class empty";
    j["unreachable"] = {s.label(y), s.label(x)};
  } else if (rep.failure == ErgodicityFailure::not_lower_reachable) {
    r.line("witness", "not lower reachable");
    r.line("failing_state", s.label(*rep.failing_state));
    j["witness"] = "not lower reachable";
    j["failing_state"] = s.label(*rep.failing_state);
  }
  if (rep.trace) {
    Json trace = Json::array();
    for (std::size_t k = 0; k < rep.trace->sets.size(); ++k) {
      r.line("lower_reach[" + std::to_string(k) + "]", join_states(s, rep.trace->sets[k]));
      trace.push_back(state_list(s, rep.trace->sets[k]));
    }
    j["lower_reach"] = std::move(trace);
  }
  if (rep.ergodic) {
    Json paths = Json::array();
    for (std::size_t y = 0; y < rep.paths.size(); ++y) {
      std::string text;
      Json path_json = Json::array();
      for (std::size_t v : rep.paths[y]) {
        text += (text.empty() ? "" : " -> ") + s.label(v);
        path_json.push_back(s.label(v));
      }
      r.line("path[" + s.label(y) + "]", text);
      paths.push_back(std::move(path_json));
    }
    j["paths"] = std::move(paths);
  }
  r.finish();
  return rep.ergodic ? kSuccess : kNegative;
}

int cmd_evaluate(const std::string& path, const std::vector<double>& fvals, double t, double tol,
                 bool timing, std::ostream& out) {
  const Loaded m = load(path);
  const Gamble f = gamble_arg(fvals, m.model);
  if (!(t >= 0.0) || !std::isfinite(t)) throw std::invalid_argument("--t must be finite and >= 0");
  Report r(out, timing);
  header(r, "evaluate", path, m);
  const TransitionSolver solver(m.model, {tol, 30});
  const SolverResult lower = solver.evolve(f, t);
  const SolverResult upper = solver.evolve_upper(f, t);
  r.line("t", num(t));
  r.line("tolerance", num(tol));
  r.line("f", join(f));
  r.line("lower", join(lower.value));
  r.line("upper", join(upper.value));
  r.line("lower_steps_used", std::to_string(lower.steps_used));
  r.line("lower_est_error", num(lower.est_error));
  r.line("upper_steps_used", std::to_string(upper.steps_used));
  r.line("upper_est_error", num(upper.est_error));
  const bool converged = lower.converged && upper.converged;
  r.line("converged", converged ? "true" : "false");
  Json& j = r.machine();
  j["t"] = t;
  j["tolerance"] = tol;
  j["f"] = gamble_json(f);
  j["lower"] = gamble_json(lower.value);
  j["upper"] = gamble_json(upper.value);
  j["lower_steps_used"] = lower.steps_used;
  j["lower_est_error"] = lower.est_error;
  j["upper_steps_used"] = upper.steps_used;
  j["upper_est_error"] = upper.est_error;
  j["converged"] = converged;
  r.finish();
  return converged ? kSuccess : kNotConverged;
}

int cmd_limit(const std::string& path, const std::vector<double>& fvals, double span_tol,
              double t_cap, double tol, bool timing, std::ostream& out) {
  const Loaded m = load(path);
  const Gamble f = gamble_arg(fvals, m.model);
  if (!(span_tol > 0.0)) throw std::invalid_argument("--span-tol must be positive");
  if (!(t_cap > 0.0)) throw std::invalid_argument("--t-cap must be positive");
  Report r(out, timing);
  header(r, "limit", path, m);
  const TransitionSolver solver(m.model, {tol, 30});
  const LimitResult lim = limit_lower_expectation(solver, f, span_tol, t_cap);
  r.line("f", join(f));
  r.line("span_tol", num(span_tol));
  r.line("t_cap", num(t_cap));
  r.line("converged", lim.converged ? "true" : "false");
  if (lim.converged) {
    r.line("value", num(lim.value));
    r.line("half_span", num(lim.half_span));
  }
  r.line("final", join(lim.final_gamble));
  r.line("t_reached", num(lim.t_reached));
  r.line("steps_used", std::to_string(lim.steps_used));
  Json& j = r.machine();
  j["converged"] = lim.converged;
  if (lim.converged) {
    j["value"] = lim.value;
    j["half_span"] = lim.half_span;
  }
  j["final"] = gamble_json(lim.final_gamble);
  j["t_reached"] = lim.t_reached;
  j["steps_used"] = lim.steps_used;
  r.finish();
  return lim.converged ? kSuccess : kNotConverged;
}

int cmd_selftest(std::uint64_t seed, std::size_t trials, bool corrupt, bool timing,
                 std::ostream& out) {
  if (trials < 1) throw std::invalid_argument("--trials must be at least 1");
  Report r(out, timing);
  const SelftestResult res = run_selftest({seed, trials, corrupt});
  r.line("command", "selftest");
  r.line("seed", std::to_string(seed));
  r.line("trials", std::to_string(trials));
  r.line("kernels", kernels::active().name);
  r.line("models", std::to_string(res.models));
  r.line("checks", std::to_string(res.checks));
  r.line("failures", std::to_string(res.failures.size()));
  for (const auto& f : res.failures) r.line("violation", f.check + ": " + f.detail);
  r.line("result", res.passed() ? "pass" : "fail");
  Json& j = r.machine();
  j["command"] = "selftest";
  j["seed"] = seed;
  j["trials"] = trials;
  j["models"] = res.models;
  j["checks"] = res.checks;
  Json failures = Json::array();
  for (const auto& f : res.failures) failures.push_back({{"check", f.check}, {"detail", f.detail}});
  j["failures"] = std::move(failures);
  r.finish();
  return res.passed() ? kSuccess : kNegative;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Lower transition operators and ergodicity of imprecise continuous-time Markov chains",
               "ictmc"};
  app.require_subcommand(1);
  bool no_timing = false;
  app.add_flag("--no-timing", no_timing, "Omit wall-clock time from reports");

  std::string model_path;
  std::vector<double> fvals;
  double t = 0.0, tol = 1e-9, span_tol = 1e-6, t_cap = 1e3;
  std::string format = "dot";
  std::uint64_t seed = SelftestOptions{}.seed;
  long long trials = static_cast<long long>(SelftestOptions{}.trials);
  bool corrupt = false;

  auto* check = app.add_subcommand("check", "Decide ergodicity of a model");
  check->add_option("model", model_path, "Model file")->required();

  auto* evaluate = app.add_subcommand("evaluate", "Compute lower and upper T_t f");
  evaluate->add_option("model", model_path, "Model file")->required();
  evaluate->add_option("--f", fvals, "Gamble values, one per state")->required();
  evaluate->add_option("--t", t, "Time")->required();
  evaluate->add_option("--tol", tol, "Solver tolerance")->capture_default_str();

  auto* limit = app.add_subcommand("limit", "Limit lower expectation of an ergodic model");
  limit->add_option("model", model_path, "Model file")->required();
  limit->add_option("--f", fvals, "Gamble values, one per state")->required();
  limit->add_option("--span-tol", span_tol, "Stop when the span drops to this")->capture_default_str();
  limit->add_option("--t-cap", t_cap, "Largest time tried")->capture_default_str();
  limit->add_option("--tol", tol, "Solver tolerance")->capture_default_str();

  auto* graph = app.add_subcommand("graph", "Emit the reachability graph");
  graph->add_option("model", model_path, "Model file")->required();
  graph->add_option("--format", format, "Output format")->check(CLI::IsMember({"dot"}))->capture_default_str();

  auto* selftest = app.add_subcommand("selftest", "Run the property battery on random models");
  selftest->add_option("--seed", seed, "Seed")->capture_default_str();
  selftest->add_option("--trials", trials, "Number of random models")->capture_default_str();
  selftest->add_flag("--inject-corruption", corrupt)->group("");

  for (auto* sub : {check, evaluate, limit, graph, selftest})
    sub->add_flag("--no-timing", no_timing, "Omit wall-clock time from reports");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kInputError;
  }

  try {
    if (*check) return cmd_check(model_path, !no_timing, out);
    if (*evaluate) return cmd_evaluate(model_path, fvals, t, tol, !no_timing, out);
    if (*limit) return cmd_limit(model_path, fvals, span_tol, t_cap, tol, !no_timing, out);
    if (*graph) {
      out << to_dot(load_model(model_path));
      return kSuccess;
    }
    if (*selftest) {
      if (trials < 1) throw std::invalid_argument("--trials must be at least 1");
      return cmd_selftest(seed, static_cast<std::size_t>(trials), corrupt, !no_timing, out);
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }
  return kInputError;
}

}  // namespace ictmc::cli
