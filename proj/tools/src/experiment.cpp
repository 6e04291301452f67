#include "experiment.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <mmdual/reference.hpp>

namespace mmdual::cli {

namespace fs = std::filesystem;

namespace {

class InfeasibleProblem : public Error {
 public:
  using Error::Error;
};

void check_keys(const json& obj, const char* where, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ConfigError(std::string(where) + ": expected an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, _] : obj.items()) {
    if (!ok.count(key)) throw ConfigError(std::string(where) + ": unknown key '" + key + "'");
  }
}

template <class T>
T get(const json& obj, const char* key, T fallback) {
  if (!obj.contains(key) || obj.at(key).is_null()) return fallback;
  return obj.at(key).get<T>();
}

std::string kind_of(const json& obj, const char* key, const char* where) {
  if (!obj.contains(key) || !obj.at(key).is_string()) {
    throw ConfigError(std::string(where) + ": missing string field '" + key + "'");
  }
  return obj.at(key).get<std::string>();
}

fs::path input_path(const json& obj, const char* where, const fs::path& base) {
  if (!obj.contains("path") || !obj.at("path").is_string()) throw ConfigError(std::string(where) + ": missing 'path'");
  fs::path p = obj.at("path").get<std::string>();
  return p.is_relative() && !base.empty() ? base / p : p;
}

ScenarioTemplate parse_template(const json& j) {
  check_keys(j, "problem.template",
             {"alpha", "Q", "dtau", "T0", "Tmin", "Tmax", "Tout", "pulse_lo", "pulse_hi", "pulse_width", "c_lo",
              "c_hi", "c_pool"});
  ScenarioTemplate t;
  t.alpha = get(j, "alpha", t.alpha);
  t.Q = get(j, "Q", t.Q);
  t.dtau = get(j, "dtau", t.dtau);
  t.T0 = get(j, "T0", t.T0);
  t.Tmin = get(j, "Tmin", t.Tmin);
  t.Tmax = get(j, "Tmax", t.Tmax);
  t.Tout = get(j, "Tout", t.Tout);
  t.pulse_lo = get(j, "pulse_lo", t.pulse_lo);
  t.pulse_hi = get(j, "pulse_hi", t.pulse_hi);
  t.pulse_width = get(j, "pulse_width", t.pulse_width);
  t.c_lo = get(j, "c_lo", t.c_lo);
  t.c_hi = get(j, "c_hi", t.c_hi);
  t.c_pool = get(j, "c_pool", t.c_pool);
  return t;
}

json template_json(const ScenarioTemplate& t) {
  return {{"alpha", t.alpha},       {"Q", t.Q},         {"dtau", t.dtau},         {"T0", t.T0},
          {"Tmin", t.Tmin},         {"Tmax", t.Tmax},   {"Tout", t.Tout},         {"pulse_lo", t.pulse_lo},
          {"pulse_hi", t.pulse_hi}, {"c_lo", t.c_lo},   {"c_hi", t.c_hi},         {"c_pool", t.c_pool},
          {"pulse_width", t.pulse_width}};
}

StepSchedule parse_schedule(const json& j) {
  const std::string kind = kind_of(j, "kind", "run.schedule");
  StepSchedule s;
  if (kind == "power-law") {
    check_keys(j, "run.schedule", {"kind", "exponent", "scale"});
    s = PowerLaw{get(j, "exponent", 0.8), get(j, "scale", 1.0)};
  } else if (kind == "constant") {
    check_keys(j, "run.schedule", {"kind", "gamma"});
    return ConstantStep{get(j, "gamma", 0.1)};
  } else if (kind == "harmonic") {
    check_keys(j, "run.schedule", {"kind", "scale"});
    s = Harmonic{get(j, "scale", 1.0)};
  } else {
    throw ConfigError("run.schedule: unknown kind '" + kind + "'");
  }
  if (!validate_schedule(s)) throw ConfigError("run.schedule: '" + kind + "' parameters out of range");
  return s;
}

json schedule_json(const StepSchedule& s) {
  if (const auto* p = std::get_if<PowerLaw>(&s)) return {{"kind", "power-law"}, {"exponent", p->exponent}, {"scale", p->scale}};
  if (const auto* c = std::get_if<ConstantStep>(&s)) return {{"kind", "constant"}, {"gamma", c->gamma}};
  return {{"kind", "harmonic"}, {"scale", std::get<Harmonic>(s).scale}};
}

RunConfig parse_run(const json& j, std::uint64_t seed) {
  check_keys(j, "run",
             {"iterations", "schedule", "seed", "tol", "record_every", "lambda_init", "early_stop",
              "convergence_target", "record_agent_rho", "record_slot_violations", "workers"});
  RunConfig r;
  r.iterations = get(j, "iterations", r.iterations);
  if (j.contains("schedule")) r.schedule = parse_schedule(j.at("schedule"));
  r.seed = get(j, "seed", seed);
  r.tol = get(j, "tol", r.tol);
  r.record_every = get(j, "record_every", r.record_every);
  if (j.contains("lambda_init")) {
    const json& li = j.at("lambda_init");
    const std::string kind = kind_of(li, "kind", "run.lambda_init");
    if (kind == "zero") {
      check_keys(li, "run.lambda_init", {"kind"});
      r.lambda_init = ZeroInit{};
    } else if (kind == "seeded-random") {
      check_keys(li, "run.lambda_init", {"kind", "scale"});
      r.lambda_init = SeededRandomInit{r.seed, get(li, "scale", 1.0)};
    } else {
      throw ConfigError("run.lambda_init: unknown kind '" + kind + "'");
    }
  }
  if (j.contains("early_stop")) {
    const json& es = j.at("early_stop");
    check_keys(es, "run.early_stop", {"enabled", "target", "consecutive"});
    r.early_stop.enabled = get(es, "enabled", r.early_stop.enabled);
    r.early_stop.target = get(es, "target", r.early_stop.target);
    r.early_stop.consecutive = get(es, "consecutive", r.early_stop.consecutive);
  }
  r.convergence_target = get(j, "convergence_target", r.convergence_target);
  r.record_agent_rho = get(j, "record_agent_rho", r.record_agent_rho);
  r.record_slot_violations = get(j, "record_slot_violations", r.record_slot_violations);
  r.workers = get(j, "workers", r.workers);
  try {
    r.validate();
  } catch (const InvalidInput& e) {
    throw ConfigError(e.what());
  }
  return r;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << text;
}

}  // namespace

ExperimentConfig parse_config(const json& doc, const fs::path& base_dir) {
  try {
    check_keys(doc, "config", {"seed", "problem", "graph", "run", "output_dir", "oracle"});
    ExperimentConfig c;
    c.seed = get<std::uint64_t>(doc, "seed", 0);

    const json problem = doc.value("problem", json{{"source", "builtin-tiny"}});
    const std::string psrc = kind_of(problem, "source", "problem");
    if (psrc == "builtin-tiny") {
      check_keys(problem, "problem", {"source"});
      c.problem = BuiltinTiny{};
    } else if (psrc == "tcl") {
      check_keys(problem, "problem", {"source", "agents", "horizon", "seed", "template"});
      TclSource t;
      t.agents = get(problem, "agents", t.agents);
      t.horizon = get(problem, "horizon", t.horizon);
      t.seed = get(problem, "seed", c.seed);
      if (problem.contains("template")) t.tmpl = parse_template(problem.at("template"));
      c.problem = t;
    } else if (psrc == "file") {
      check_keys(problem, "problem", {"source", "path"});
      c.problem = FileSource{input_path(problem, "problem", base_dir)};
    } else {
      throw ConfigError("problem: unknown source '" + psrc + "'");
    }

    const json graph = doc.value("graph", json{{"source", "complete"}});
    const std::string gsrc = kind_of(graph, "source", "graph");
    if (gsrc == "erdos-renyi") {
      check_keys(graph, "graph", {"source", "p", "seed", "max_tries"});
      ErdosRenyiSource e;
      e.p = get(graph, "p", e.p);
      e.seed = get(graph, "seed", c.seed);
      e.max_tries = get(graph, "max_tries", e.max_tries);
      c.graph = e;
    } else if (gsrc == "edge-list") {
      check_keys(graph, "graph", {"source", "path"});
      c.graph = EdgeListSource{input_path(graph, "graph", base_dir)};
    } else if (gsrc == "complete") {
      check_keys(graph, "graph", {"source"});
      c.graph = CompleteSource{};
    } else {
      throw ConfigError("graph: unknown source '" + gsrc + "'");
    }

    c.run = parse_run(doc.value("run", json::object()), c.seed);
    c.output_dir = get<std::string>(doc, "output_dir", "out");
    if (doc.contains("oracle")) {
      const json& o = doc.at("oracle");
      check_keys(o, "oracle", {"enabled", "cache"});
      c.oracle.enabled = get(o, "enabled", true);
      if (o.contains("cache") && !o.at("cache").is_null()) {
        fs::path p = o.at("cache").get<std::string>();
        c.oracle.cache = p.is_relative() && !base_dir.empty() ? base_dir / p : p;
      }
    }
    return c;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

ExperimentConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return parse_config(doc, path.parent_path());
}

void apply_overrides(ExperimentConfig& cfg, const Overrides& o) {
  if (o.output_dir) cfg.output_dir = *o.output_dir;
  if (o.iterations) {
    cfg.run.iterations = *o.iterations;
    if (cfg.run.iterations < 1) throw ConfigError("--iterations must be >= 1");
  }
  if (o.seed) {
    cfg.seed = *o.seed;
    cfg.run.seed = *o.seed;
    if (auto* r = std::get_if<SeededRandomInit>(&cfg.run.lambda_init)) r->seed = *o.seed;
    if (auto* t = std::get_if<TclSource>(&cfg.problem)) t->seed = *o.seed;
    if (auto* e = std::get_if<ErdosRenyiSource>(&cfg.graph)) e->seed = *o.seed;
  }
}

json resolved(const ExperimentConfig& c) {
  json problem;
  if (const auto* t = std::get_if<TclSource>(&c.problem)) {
    problem = {{"source", "tcl"}, {"agents", t->agents}, {"horizon", t->horizon}, {"seed", t->seed},
               {"template", template_json(t->tmpl)}};
  } else if (const auto* f = std::get_if<FileSource>(&c.problem)) {
    problem = {{"source", "file"}, {"path", f->path.string()}};
  } else {
    problem = {{"source", "builtin-tiny"}};
  }
  json graph;
  if (const auto* e = std::get_if<ErdosRenyiSource>(&c.graph)) {
    graph = {{"source", "erdos-renyi"}, {"p", e->p}, {"seed", e->seed}, {"max_tries", e->max_tries}};
  } else if (const auto* l = std::get_if<EdgeListSource>(&c.graph)) {
    graph = {{"source", "edge-list"}, {"path", l->path.string()}};
  } else {
    graph = {{"source", "complete"}};
  }
  const RunConfig& r = c.run;
  json lambda_init = {{"kind", "zero"}};
  if (const auto* s = std::get_if<SeededRandomInit>(&r.lambda_init)) {
    lambda_init = {{"kind", "seeded-random"}, {"scale", s->scale}};
  }
  json run = {{"iterations", r.iterations},
              {"schedule", schedule_json(r.schedule)},
              {"seed", r.seed},
              {"tol", r.tol},
              {"record_every", r.record_every},
              {"lambda_init", lambda_init},
              {"early_stop",
               {{"enabled", r.early_stop.enabled},
                {"target", r.early_stop.target},
                {"consecutive", r.early_stop.consecutive}}},
              {"convergence_target", r.convergence_target},
              {"record_agent_rho", r.record_agent_rho},
              {"record_slot_violations", r.record_slot_violations},
              {"workers", r.workers}};
  json oracle = {{"enabled", c.oracle.enabled}, {"cache", c.oracle.cache ? json(c.oracle.cache->string()) : json(nullptr)}};
  return {{"seed", c.seed}, {"problem", problem}, {"graph", graph},
          {"run", run},     {"output_dir", c.output_dir.string()}, {"oracle", oracle}};
}

MinMaxProblem builtin_tiny() {
  MinMaxProblem p;
  p.S = 2;
  for (double c : {1.0, 2.0}) {
    AgentSpec a = AgentSpec::box(2, 0.0, 1.0, ScalarCost::affine(c));
    a.add_constraint(VectorXd::Constant(2, -1.0), -1.0);
    p.agents.push_back(std::move(a));
  }
  return p;
}

MinMaxProblem build_problem(const ExperimentConfig& cfg) {
  MinMaxProblem p;
  if (const auto* t = std::get_if<TclSource>(&cfg.problem)) {
    try {
      p = build_scenario(t->agents, t->horizon, t->seed, t->tmpl).problem;
    } catch (const ScenarioInfeasible&) {
      throw;
    } catch (const InvalidInput& e) {
      throw ConfigError(e.what());
    }
  } else if (const auto* f = std::get_if<FileSource>(&cfg.problem)) {
    try {
      p = read_problem_file(f->path.string());
    } catch (const MalformedFile& e) {
      throw ConfigError(e.what());
    }
  } else {
    p = builtin_tiny();
  }
  const ValidationReport rep = validate(p);
  if (!rep.ok) {
    bool only_empty = !rep.agents.empty();
    for (const auto& a : rep.agents) only_empty = only_empty && a.dimensions_ok && a.box_finite && a.convex;
    std::string msg = "invalid problem";
    for (const auto& issue : rep.issues) msg += "; " + issue;
    if (only_empty) throw InfeasibleProblem(msg);
    throw ConfigError(msg);
  }
  return p;
}

Graph build_graph(const ExperimentConfig& cfg, std::size_t n_agents) {
  Graph g;
  try {
    if (const auto* e = std::get_if<ErdosRenyiSource>(&cfg.graph)) {
      g = erdos_renyi(n_agents, e->p, e->seed, e->max_tries);
    } else if (const auto* l = std::get_if<EdgeListSource>(&cfg.graph)) {
      g = read_edge_list_file(l->path.string());
    } else {
      g = Graph::complete(n_agents);
    }
  } catch (const NotConnectedAfterRetries& e) {
    throw ConfigError(e.what());
  } catch (const InvalidInput& e) {
    throw ConfigError(e.what());
  }
  if (g.num_nodes() != n_agents) {
    throw ConfigError("dimension mismatch: graph has " + std::to_string(g.num_nodes()) + " nodes but the problem has " +
                      std::to_string(n_agents) + " agents");
  }
  if (!is_connected(g)) throw ConfigError("graph is not connected");
  return g;
}

ExperimentOutput run_experiment(const ExperimentConfig& cfg) {
  const MinMaxProblem problem = build_problem(cfg);
  const Graph g = build_graph(cfg, problem.agents.size());
  ExperimentOutput out;
  out.problem_hash = problem_hash(problem);

  if (cfg.oracle.enabled) {
    if (cfg.oracle.cache && fs::exists(*cfg.oracle.cache)) {
      try {
        std::ifstream in(*cfg.oracle.cache);
        out.oracle = oracle_from_json(json::parse(in), out.problem_hash);
      } catch (const std::exception&) {
        out.oracle.reset();
      }
    }
    if (!out.oracle) {
      out.oracle = solve_centralized(problem, cfg.run.tol);
      if (cfg.oracle.cache) write_file(*cfg.oracle.cache, to_json(*out.oracle, out.problem_hash).dump(2) + "\n");
    }
  }

  out.result = run(problem, g, cfg.run, out.oracle ? std::optional<double>(out.oracle->P_star) : std::nullopt);

  fs::create_directories(cfg.output_dir);
  std::ostringstream csv;
  write_trace_csv(csv, out.result.trace);
  write_file(cfg.output_dir / "trace.csv", csv.str());

  json report = to_json(out.result.report);
  report["problem_hash"] = out.problem_hash;
  report["num_agents"] = problem.agents.size();
  report["horizon"] = problem.S;
  report["num_edges"] = g.num_edges();
  report["rate_fit"] = nullptr;
  if (out.oracle) {
    try {
      const RateFit fit = rate_fit(out.result.trace);
      report["rate_fit"] = {{"exponent", fit.exponent}, {"points", fit.points}};
    } catch (const InsufficientData&) {
    }
  }
  write_file(cfg.output_dir / "report.json", report.dump(2) + "\n");
  write_file(cfg.output_dir / "resolved_config.json", resolved(cfg).dump(2) + "\n");
  write_file(cfg.output_dir / "timing.json", json{{"wall_time_s", out.result.report.wall_time_s}}.dump(2) + "\n");
  if (out.oracle) write_file(cfg.output_dir / "oracle.json", to_json(*out.oracle, out.problem_hash).dump(2) + "\n");
  return out;
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const MalformedFile*>(&e) ||
      dynamic_cast<const InvalidInput*>(&e) || dynamic_cast<const IndexOutOfRange*>(&e)) {
    return kConfigError;
  }
  if (dynamic_cast<const InfeasibleProblem*>(&e) || dynamic_cast<const ScenarioInfeasible*>(&e)) return kInfeasible;
  return kSolverFailure;
}

}  // namespace mmdual::cli
