#include "geollm/cli.hpp"

#include <cstdlib>
#include <istream>
#include <memory>
#include <optional>
#include <ostream>
#include <span>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "CLI11.hpp"

#include "geollm/agent.hpp"
#include "geollm/agent_tools.hpp"
#include "geollm/diggs.hpp"
#include "geollm/error.hpp"
#include "geollm/geotech.hpp"
#include "geollm/llm_backend.hpp"
#include "geollm/retrieval.hpp"
#include "geollm/soil_io.hpp"
#include "geollm/text_util.hpp"
#include "geollm/uscs.hpp"

namespace geollm::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

class Session {
 public:
  Session(std::ostream& out, std::ostream& err, std::istream& in, const CliConfig& config)
      : out_(out), err_(err), in_(in), config_(config) {}

  bool machine() const { return config_.mode == OutputMode::kMachine; }
  std::ostream& out() { return out_; }
  std::ostream& err() { return err_; }
  std::istream& in() { return in_; }

  // Machine mode: the single record for this invocation.
  void record(json j) {
    j["ok"] = true;
    out_ << j.dump() << "\n";
  }
  void human(std::string_view line) {
    if (!machine()) out_ << line << "\n";
  }

  BackendConfig backend_config() const {
    return config_.config_file.empty() ? BackendConfig{} : BackendConfig::load(config_.config_file);
  }

  std::unique_ptr<CompletionBackend> completion_backend() const {
    const auto& b = config_.backend;
    if (starts_with(b, "scripted:")) return ScriptedBackend::from_file(b.substr(9));
    if (b == "http") return std::make_unique<HttpBackend>(backend_config());
    throw ValidationError(fmt::format("unknown backend '{}' (use http or scripted:<file>)", b));
  }

  // For an existing index the embedder is implied by its recorded id.
  std::unique_ptr<EmbeddingBackend> embedder(const std::string& id = {}) const {
    const std::string want = id.empty() ? config_.embedder : id;
    if (want == "hash" || starts_with(want, "hash-bow-")) {
      std::size_t dim = 256;
      if (starts_with(want, "hash-bow-")) {
        const auto parsed = parse_integer(want.substr(9));
        if (!parsed || *parsed <= 0) throw ValidationError(fmt::format("bad embedder id '{}'", want));
        dim = static_cast<std::size_t>(*parsed);
      }
      return std::make_unique<HashEmbedder>(dim);
    }
    if (want == "http" || starts_with(want, "http:")) {
      return std::make_unique<HttpEmbedder>(std::make_shared<HttpBackend>(backend_config()));
    }
    throw ValidationError(fmt::format("unknown embedder '{}' (use hash or http)", want));
  }

 private:
  std::ostream& out_;
  std::ostream& err_;
  std::istream& in_;
  const CliConfig& config_;
};

std::optional<double> opt(const CLI::Option* o, double v) {
  return o->count() > 0 ? std::optional<double>(v) : std::nullopt;
}

// ---- classify --------------------------------------------------------------

struct ClassifyArgs {
  double pass4 = 100.0, pass200 = 0.0, ll = 0.0, pl = 0.0, d10 = 0.0, d30 = 0.0, d60 = 0.0;
  CLI::Option *o_ll{}, *o_pl{}, *o_d10{}, *o_d30{}, *o_d60{};
  std::string file;
  bool explain = false;
};

json outcome_json(const std::string& id, const ClassificationOutcome& o) {
  json j{{"id", id}};
  if (o.ok()) {
    j["symbol"] = std::string(to_string(o.code->symbol));
    j["rationale"] = o.code->rationale;
  } else {
    j["error"] = o.error;
    if (!o.missing_field.empty()) j["missing_field"] = o.missing_field;
  }
  return j;
}

int run_classify(Session& s, const ClassifyArgs& a) {
  if (!a.file.empty()) {
    const auto labeled = load_samples(a.file);
    std::vector<SoilSample> samples;
    for (const auto& l : labeled) samples.push_back(l.sample);
    const auto outcomes = classify_batch(samples);
    json results = json::array();
    std::size_t failed = 0;
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
      const auto& o = outcomes[i];
      if (!o.ok()) ++failed;
      results.push_back(outcome_json(labeled[i].id, o));
      s.human(o.ok() ? fmt::format("{}: {}", labeled[i].id, to_string(o.code->symbol))
                     : fmt::format("{}: unclassified ({})", labeled[i].id, o.error));
    }
    if (s.machine()) s.record({{"command", "classify"}, {"results", results}, {"failed", failed}});
    return failed == 0 ? kExitOk : kExitDomainError;
  }
  SoilSample sample;
  sample.pass_sieve4 = a.pass4;
  sample.pass_sieve200 = a.pass200;
  sample.liquid_limit = opt(a.o_ll, a.ll);
  sample.plastic_limit = opt(a.o_pl, a.pl);
  sample.d10 = opt(a.o_d10, a.d10);
  sample.d30 = opt(a.o_d30, a.d30);
  sample.d60 = opt(a.o_d60, a.d60);
  const auto code = classify(sample);
  if (s.machine()) {
    s.record({{"command", "classify"},
              {"symbol", std::string(to_string(code.symbol))},
              {"rationale", code.rationale}});
    return kExitOk;
  }
  s.out() << to_string(code.symbol) << "\n";
  if (a.explain) {
    for (const auto& r : code.rationale) s.out() << "  " << r << "\n";
  }
  return kExitOk;
}

// ---- calc ------------------------------------------------------------------

struct BearingArgs {
  double su = 0, sc = 0, phi = 0, c = 0, gamma = 0, width = 0, surcharge = 0;
  std::string shape;
  CLI::Option *o_su{}, *o_sc{}, *o_phi{};
};

int run_bearing(Session& s, const BearingArgs& a) {
  BearingResult r;
  if (a.o_phi->count() > 0) {
    r = bearing_capacity_general(a.c, a.phi, a.gamma, a.width, a.surcharge);
  } else {
    if (a.o_su->count() == 0) throw ValidationError("calc bearing needs --su or --phi");
    double sc = a.sc;
    if (a.o_sc->count() == 0) {
      const auto shape = parse_shape(a.shape.empty() ? "circular" : a.shape);
      if (!shape) throw ValidationError(fmt::format("unknown shape '{}'", a.shape));
      sc = shape_factor(*shape);
    }
    r = bearing_capacity_undrained(a.su, sc);
  }
  if (s.machine()) {
    s.record({{"command", "calc bearing"},
              {"method", to_string(r.method)},
              {"q_f", r.q_f},
              {"unit", "kPa"},
              {"factors", {{"nc", r.factors.nc}, {"nq", r.factors.nq},
                           {"ngamma", r.factors.ngamma}, {"sc", r.factors.sc}}}});
  } else {
    s.out() << fmt::format("Bearing capacity = {} kPa\n", format_compact(r.q_f));
  }
  return kExitOk;
}

struct MaxLoadArgs {
  double qf = 0, diameter = 0, width = 0, length = 0, depth = 0;
  std::string shape;
  CLI::Option *o_diameter{}, *o_width{}, *o_length{};
};

int run_maxload(Session& s, const MaxLoadArgs& a) {
  std::string shape_name = a.shape;
  if (shape_name.empty()) {
    shape_name = a.o_diameter->count() > 0 ? "circular"
                 : a.o_length->count() > 0 ? "rectangular"
                                           : "strip";
  }
  const auto shape = parse_shape(shape_name);
  if (!shape) throw ValidationError(fmt::format("unknown shape '{}'", shape_name));
  const auto need = [](const CLI::Option* o, double v) {
    if (o->count() == 0) throw ValidationError(fmt::format("calc maxload needs {}", o->get_name()));
    return v;
  };
  const Foundation f = *shape == FoundationShape::kCircular ? Foundation::circular(need(a.o_diameter, a.diameter))
                       : *shape == FoundationShape::kStrip ? Foundation::strip(need(a.o_width, a.width))
                           : Foundation::rectangular(need(a.o_width, a.width),
                                                     need(a.o_length, a.length));
  const double load = max_load(a.qf, f, a.depth);
  if (s.machine()) {
    s.record({{"command", "calc maxload"},
              {"shape", to_string(f.shape())},
              {"max_load", load},
              {"unit", "kN"},
              {"spread_width", stress_spread_width(f.width(), a.depth)}});
  } else {
    s.out() << fmt::format("Max. Load = {} kN\n", format_compact(load));
  }
  return kExitOk;
}

struct WallArgs {
  WallCheckInputs in;
  double mu = 0, delta = 0;
  CLI::Option *o_mu{}, *o_delta{};
};

int run_wall(Session& s, WallArgs a) {
  if (a.o_mu->count() > 0) a.in.sliding.base_friction_coefficient = a.mu;
  if (a.o_delta->count() > 0) a.in.sliding.base_friction_angle = a.delta;
  const auto r = check_wall(a.in);
  if (s.machine()) {
    json j{{"command", "calc wall"},
           {"required_fos", r.required_fos},
           {"sliding", {{"ka", r.sliding.ka}, {"active_thrust", r.sliding.active_thrust},
                        {"resisting_force", r.sliding.resisting_force},
                        {"fos", r.sliding.fos}, {"ok", r.sliding.ok}}},
           {"eccentricity", {{"e", r.eccentricity.e}, {"ok", r.eccentricity.middle_third_ok}}},
           {"all_ok", r.all_ok()}};
    if (r.bearing) {
      j["bearing"] = {{"effective_width", r.bearing->effective_width}, {"q", r.bearing->q},
                      {"allowable", r.bearing->allowable}, {"ok", r.bearing->ok}};
    } else {
      j["bearing"] = {{"error", r.bearing_error}};
    }
    s.record(j);
  } else {
    const auto verdict = [](bool ok) { return ok ? "OK" : "FAIL"; };
    s.out() << fmt::format("Sliding: Ka = {}, Pa = {} kN/m, FoS = {} (required {}) {}\n",
                           format_compact(r.sliding.ka, 6), format_compact(r.sliding.active_thrust, 6),
                           format_compact(r.sliding.fos, 6), format_compact(r.required_fos),
                           verdict(r.sliding.ok));
    s.out() << fmt::format("Overturning: e = {} m, middle third {}\n",
                           format_compact(r.eccentricity.e, 6),
                           verdict(r.eccentricity.middle_third_ok));
    if (r.bearing) {
      s.out() << fmt::format("Bearing: B' = {} m, q = {} kPa, allowable {} kPa {}\n",
                             format_compact(r.bearing->effective_width, 6),
                             format_compact(r.bearing->q, 6),
                             format_compact(r.bearing->allowable, 6), verdict(r.bearing->ok));
    } else {
      s.out() << fmt::format("Bearing: {}\n", r.bearing_error);
    }
    s.out() << (r.all_ok() ? "Wall: all checks pass\n" : "Wall: at least one check fails\n");
  }
  return kExitOk;
}

int run_trucks(Session& s, double volume, double capacity, double loss) {
  const auto n = truck_count(volume, capacity, loss);
  if (s.machine()) {
    s.record({{"command", "calc trucks"}, {"trucks", n}, {"volume", volume},
              {"capacity", capacity}, {"loss", loss}});
  } else {
    s.out() << n << "\n";
  }
  return kExitOk;
}

std::pair<double, double> parse_term(const std::string& text) {
  const auto parts = split(text, ',');
  if (parts.size() != 2) throw ValidationError(fmt::format("term '{}' is not <coefficient>,<factor>", text));
  const auto c = parse_double(trim(parts[0]));
  const auto f = parse_double(trim(parts[1]));
  if (!c || !f) throw ValidationError(fmt::format("term '{}' is not numeric", text));
  return {*c, *f};
}

int run_audit(Session& s, const std::vector<std::string>& terms_text, double claimed,
              double tolerance) {
  std::vector<std::pair<double, double>> terms;
  for (const auto& t : terms_text) terms.push_back(parse_term(t));
  const auto r = audit_linear_claim(terms, claimed, tolerance);
  if (s.machine()) {
    s.record({{"command", "calc audit"}, {"recomputed", r.recomputed}, {"claimed", r.claimed},
              {"difference", r.difference}, {"matches", r.matches}});
  } else {
    s.out() << fmt::format("Recomputed = {}, claimed = {}: {}\n", format_compact(r.recomputed),
                           format_compact(r.claimed), r.matches ? "matches" : "MISMATCH");
  }
  return r.matches ? kExitOk : kExitDomainError;
}

// ---- retrieval -------------------------------------------------------------

int run_index(Session& s, const std::vector<std::string>& inputs, const std::string& out_dir,
              std::size_t max_tokens, std::size_t overlap) {
  std::vector<KnowledgeChunk> chunks;
  for (const auto& input : inputs) {
    const fs::path p(input);
    std::vector<fs::path> files;
    if (fs::is_directory(p)) {
      for (const auto& e : fs::directory_iterator(p)) {
        if (e.is_regular_file()) files.push_back(e.path());
      }
      std::sort(files.begin(), files.end());
    } else {
      files.push_back(p);
    }
    for (const auto& f : files) {
      auto c = chunk_document(read_file(f), f.filename().string(), max_tokens, overlap);
      chunks.insert(chunks.end(), std::make_move_iterator(c.begin()),
                    std::make_move_iterator(c.end()));
    }
  }
  auto embedder = s.embedder();
  const auto index = VectorIndex::build(std::move(chunks), *embedder);
  index.save(out_dir);
  if (s.machine()) {
    s.record({{"command", "index"}, {"chunks", index.size()}, {"dimension", index.dimension()},
              {"embedder", index.embedder_id()}, {"out", out_dir}});
  } else {
    s.out() << fmt::format("Indexed {} chunk(s) with {} into {}\n", index.size(),
                           index.embedder_id(), out_dir);
  }
  return kExitOk;
}

int run_search(Session& s, const std::string& dir, const std::string& query, std::size_t k) {
  const auto index = VectorIndex::load(dir);
  auto embedder = s.embedder(index.embedder_id());
  const auto result = index.search(query, *embedder, k);
  if (s.machine()) {
    json hits = json::array();
    for (const auto& h : result.hits) hits.push_back({{"chunk_id", h.chunk_id}, {"score", h.score}});
    s.record({{"command", "search"},
              {"status", result.status == SearchStatus::kOk ? "ok" : "empty_index"},
              {"hits", hits}});
    return kExitOk;
  }
  if (result.status == SearchStatus::kEmptyIndex) {
    s.out() << "Index is empty.\n";
    return kExitOk;
  }
  for (const auto& h : result.hits) {
    const auto* chunk = index.find(h.chunk_id);
    auto preview = chunk ? std::string(trim(chunk->text)).substr(0, 72) : std::string{};
    for (auto& ch : preview) {
      if (ch == '\n') ch = ' ';
    }
    s.out() << fmt::format("{:.6f}  {}  {}\n", h.score, h.chunk_id, preview);
  }
  return kExitOk;
}

json answer_json(const GroundedAnswer& a) {
  return {{"status", a.status == AnswerStatus::kAnswered ? "answered" : "no_context"},
          {"answer", a.text},
          {"chunk_ids", a.chunk_ids}};
}

void print_answer(Session& s, const GroundedAnswer& a) {
  s.out() << a.text << "\n";
  if (!a.chunk_ids.empty()) s.out() << fmt::format("Sources: {}\n", fmt::join(a.chunk_ids, ", "));
}

int run_ask(Session& s, const std::string& dir, const std::string& query, std::size_t k,
            std::size_t budget) {
  const auto index = VectorIndex::load(dir);
  auto embedder = s.embedder(index.embedder_id());
  auto backend = s.completion_backend();
  if (!query.empty()) {
    const auto a = answer(index, *embedder, *backend, query, k, budget);
    if (s.machine()) {
      auto j = answer_json(a);
      j["command"] = "ask";
      s.record(j);
    } else {
      print_answer(s, a);
    }
    return kExitOk;
  }
  // Interactive: one question per line until EOF or "quit".
  json answers = json::array();
  std::string line;
  while (true) {
    if (!s.machine()) s.out() << "ask> " << std::flush;
    if (!std::getline(s.in(), line)) break;
    const auto q = trim(line);
    if (q.empty()) continue;
    if (q == "quit" || q == "exit") break;
    const auto a = answer(index, *embedder, *backend, q, k, budget);
    if (s.machine()) {
      auto j = answer_json(a);
      j["query"] = std::string(q);
      answers.push_back(j);
    } else {
      print_answer(s, a);
    }
  }
  if (s.machine()) s.record({{"command", "ask"}, {"answers", answers}});
  return kExitOk;
}

// ---- diggs -----------------------------------------------------------------

std::vector<double> parse_trials(const std::string& text) {
  std::vector<double> out;
  for (const auto& part : split(text, ',')) {
    const auto v = parse_double(trim(part));
    if (!v) throw ValidationError(fmt::format("trial value '{}' is not a number", part));
    out.push_back(*v);
  }
  return out;
}

int run_diggs_emit(Session& s, const std::string& trials, bool automated, const std::string& out) {
  diggs::PlasticLimitTrialSet set{parse_trials(trials), !automated};
  const auto xml = diggs::emit_plastic_limit_xml(set);
  if (!out.empty()) write_file_atomic(out, xml);
  if (s.machine()) {
    json j{{"command", "diggs emit"}, {"trials", set.trials}, {"is_manual", set.is_manual}};
    if (out.empty()) {
      j["xml"] = xml;
    } else {
      j["out"] = out;
    }
    s.record(j);
  } else if (out.empty()) {
    s.out() << xml;
  } else {
    s.out() << fmt::format("Wrote {} trial(s) to {}\n", set.trials.size(), out);
  }
  return kExitOk;
}

int run_diggs_parse(Session& s, const std::string& file) {
  const auto set = diggs::parse_plastic_limit_xml(read_file(file));
  if (s.machine()) {
    s.record({{"command", "diggs parse"}, {"trials", set.trials}, {"is_manual", set.is_manual}});
  } else {
    for (std::size_t i = 0; i < set.trials.size(); ++i) {
      s.out() << fmt::format("tr{}  trialNo={}  waterContent={}\n", i + 1, i + 1,
                             format_with_decimal(set.trials[i]));
    }
    s.out() << fmt::format("isManual={}\n", set.is_manual ? "true" : "false");
  }
  return kExitOk;
}

int run_diggs_tag(Session& s, const std::string& concept_name) {
  const auto tag = diggs::tag_for(concept_name);
  if (s.machine()) {
    s.record({{"command", "diggs tag"}, {"parent", tag.parent}, {"child", tag.child}});
  } else {
    s.out() << fmt::format("<{}> within <{}>\n", tag.child, tag.parent);
  }
  return kExitOk;
}

// ---- agent -----------------------------------------------------------------

struct AgentArgs {
  std::string task;
  std::string tools = "all";
  std::string report;
  std::vector<std::string> report_dirs;
  std::string memory;
  std::vector<std::string> seeds;
  std::string trace_out;
  std::size_t max_steps = agent::kDefaultMaxSteps;
};

struct AgentSetup {
  agent::ToolRegistry registry;
  MemoryStore memory;
};

AgentSetup agent_setup(const AgentArgs& a) {
  agent::GeotechToolOptions options;
  for (const auto& d : a.report_dirs) options.report_dirs.emplace_back(d);
  if (!a.report.empty()) {
    const fs::path report(a.report);
    if (!agent::resolve_report(a.report, options)) {
      throw IoError(fmt::format("soil report '{}' not found", a.report));
    }
    if (report.has_parent_path()) options.report_dirs.insert(options.report_dirs.begin(), report.parent_path());
  }
  options.report_dirs.emplace_back(fs::current_path());
  std::vector<std::string> names;
  if (a.tools != "all") {
    for (const auto& n : split(a.tools, ',')) {
      if (!trim(n).empty()) names.emplace_back(trim(n));
    }
  }
  AgentSetup setup{agent::geotech_registry(options, names), {}};
  if (!a.memory.empty()) setup.memory = MemoryStore::load(a.memory);
  for (const auto& seed : a.seeds) {
    for (const auto& [key, rec] : MemoryStore::load(seed).entries()) {
      if (!setup.memory.contains(key)) setup.memory.put(key, rec.value, rec.unit, rec.provenance);
    }
  }
  return setup;
}

int run_agent(Session& s, const AgentArgs& a) {
  auto setup = agent_setup(a);
  auto backend = s.completion_backend();
  agent::AgentOptions options;
  options.max_steps = a.max_steps;
  const auto trace = agent::run(a.task, setup.registry, setup.memory, *backend, options);
  if (!a.memory.empty()) setup.memory.save(a.memory);
  if (!a.trace_out.empty()) write_file_atomic(a.trace_out, trace.to_json().dump(2) + "\n");
  if (s.machine()) {
    auto j = trace.to_json();
    j["command"] = "agent run";
    s.record(j);
  } else {
    s.out() << trace.render_text();
  }
  if (!trace.succeeded()) {
    s.err() << (trace.error.empty()
                    ? fmt::format("error: no final answer within {} step(s)\n", a.max_steps)
                    : fmt::format("error: {}\n", trace.error));
    return kExitDomainError;
  }
  return kExitOk;
}

int run_agent_repl(Session& s, const AgentArgs& a) {
  auto setup = agent_setup(a);
  auto backend = s.completion_backend();
  agent::AgentOptions options;
  options.max_steps = a.max_steps;
  json traces = json::array();
  bool all_ok = true;
  std::string line;
  while (true) {
    if (!s.machine()) s.out() << "agent> " << std::flush;
    if (!std::getline(s.in(), line)) break;
    const auto task = trim(line);
    if (task.empty()) continue;
    if (task == "quit" || task == "exit") break;
    const auto trace = agent::run(task, setup.registry, setup.memory, *backend, options);
    all_ok = all_ok && trace.succeeded();
    if (!a.memory.empty()) setup.memory.save(a.memory);
    if (s.machine()) {
      traces.push_back(trace.to_json());
    } else {
      s.out() << trace.render_text();
    }
  }
  if (s.machine()) s.record({{"command", "agent repl"}, {"traces", traces}});
  return all_ok ? kExitOk : kExitDomainError;
}

// ---- config ----------------------------------------------------------------

int run_config_show(Session& s, const CliConfig& config) {
  const auto backend = s.backend_config();
  const char* key = std::getenv(backend.api_key_env.c_str());
  json defaults{{"k", kDefaultTopK},
                {"token_budget", kDefaultTokenBudget},
                {"required_fos", kDefaultRequiredFos},
                {"temperature", 0.0},
                {"max_steps", agent::kDefaultMaxSteps},
                {"audit_tolerance", kDefaultAuditTolerance},
                {"undrained_nc", kUndrainedNc}};
  json j{{"command", "config show"},
         {"defaults", defaults},
         {"backend", config.backend},
         {"embedder", config.embedder},
         {"backend_config", backend.to_json()},
         {"api_key_present", key != nullptr && *key != '\0'}};
  if (s.machine()) {
    s.record(j);
    return kExitOk;
  }
  s.out() << fmt::format("k = {}\ntoken_budget = {}\nrequired_fos = {}\ntemperature = 0\n"
                         "max_steps = {}\naudit_tolerance = {}\nundrained_nc = {}\n",
                         kDefaultTopK, kDefaultTokenBudget, format_compact(kDefaultRequiredFos),
                         agent::kDefaultMaxSteps, format_compact(kDefaultAuditTolerance),
                         format_compact(kUndrainedNc));
  s.out() << fmt::format("backend = {}\nembedder = {}\n", config.backend, config.embedder);
  s.out() << fmt::format("endpoint = {}\nmodel = {}\nembedding_model = {}\napi_key_env = {} ({})\n",
                         backend.endpoint, backend.model, backend.embedding_model,
                         backend.api_key_env, j["api_key_present"].get<bool>() ? "set" : "unset");
  return kExitOk;
}

}  // namespace

int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err,
             std::istream& in) {
  CliConfig config;
  if (const char* b = std::getenv("GEOLLM_BACKEND")) config.backend = b;
  CLI::App app{"Deterministic geotechnical calculation, retrieval and agent toolkit", "geollm"};
  app.require_subcommand(1);
  bool json_mode = false;
  app.add_flag("--json", json_mode, "Machine output: one JSON record on stdout");
  app.add_option("--backend", config.backend,
                 "Completion backend: http or scripted:<file> (env GEOLLM_BACKEND)");
  app.add_option("--config", config.config_file, "Backend configuration JSON file");
  app.add_option("--embedder", config.embedder, "Embedder for new indexes: hash or http");

  std::function<int(Session&)> action;

  auto* classify_cmd = app.add_subcommand("classify", "USCS classification of a sample");
  ClassifyArgs ca;
  classify_cmd->add_option("--pass4", ca.pass4, "Percent passing No. 4 sieve")->capture_default_str();
  classify_cmd->add_option("--pass200", ca.pass200, "Percent passing No. 200 sieve")->capture_default_str();
  ca.o_ll = classify_cmd->add_option("--ll", ca.ll, "Liquid limit");
  ca.o_pl = classify_cmd->add_option("--pl", ca.pl, "Plastic limit");
  ca.o_d10 = classify_cmd->add_option("--d10", ca.d10, "D10, mm");
  ca.o_d30 = classify_cmd->add_option("--d30", ca.d30, "D30, mm");
  ca.o_d60 = classify_cmd->add_option("--d60", ca.d60, "D60, mm");
  classify_cmd->add_option("--file", ca.file, "Batch file of sample records (text or JSON)");
  classify_cmd->add_flag("--explain", ca.explain, "Print the decision path");
  classify_cmd->callback([&] { action = [&](Session& s) { return run_classify(s, ca); }; });

  auto* calc = app.add_subcommand("calc", "Engineering calculations");
  calc->require_subcommand(1);

  BearingArgs ba;
  auto* bearing = calc->add_subcommand("bearing", "Bearing capacity");
  ba.o_su = bearing->add_option("--su", ba.su, "Undrained strength, kPa");
  ba.o_sc = bearing->add_option("--sc", ba.sc, "Shape factor");
  bearing->add_option("--shape", ba.shape, "circular, strip or rectangular (when --sc is absent)");
  ba.o_phi = bearing->add_option("--phi", ba.phi, "Friction angle, degrees (general method)");
  bearing->add_option("--c", ba.c, "Cohesion, kPa (general method)");
  bearing->add_option("--gamma", ba.gamma, "Unit weight, kN/m^3 (general method)");
  bearing->add_option("--width", ba.width, "Foundation width, m (general method)");
  bearing->add_option("--surcharge", ba.surcharge, "Overburden at founding level, kPa");
  bearing->callback([&] { action = [&](Session& s) { return run_bearing(s, ba); }; });

  MaxLoadArgs ma;
  auto* maxload = calc->add_subcommand("maxload", "Maximum load with 2:1 stress transfer");
  maxload->add_option("--qf", ma.qf, "Bearing capacity, kPa")->required();
  ma.o_diameter = maxload->add_option("--diameter", ma.diameter, "Circular foundation diameter, m");
  ma.o_width = maxload->add_option("--width", ma.width, "Width B, m");
  ma.o_length = maxload->add_option("--length", ma.length, "Length L, m");
  maxload->add_option("--shape", ma.shape, "circular, strip or rectangular");
  maxload->add_option("--depth", ma.depth, "Depth of the loaded layer, m")->required();
  maxload->callback([&] { action = [&](Session& s) { return run_maxload(s, ma); }; });

  WallArgs wa;
  auto* wall = calc->add_subcommand("wall", "Retaining-wall sliding, overturning and bearing");
  wall->add_option("--vertical", wa.in.sliding.vertical_load, "Total vertical load, kN/m")->required();
  wa.o_mu = wall->add_option("--mu", wa.mu, "Base friction coefficient");
  wa.o_delta = wall->add_option("--delta", wa.delta, "Base friction angle, degrees");
  wall->add_option("--phi", wa.in.sliding.backfill_friction_angle, "Backfill friction angle, degrees")->required();
  wall->add_option("--gamma", wa.in.sliding.backfill_unit_weight, "Backfill unit weight, kN/m^3")->required();
  wall->add_option("--height", wa.in.sliding.wall_height, "Retained height, m")->required();
  wall->add_option("--moment", wa.in.net_moment, "Net moment about the base centre, kN m/m");
  wall->add_option("--base", wa.in.base_width, "Base width, m")->required();
  wall->add_option("--qult", wa.in.q_ult, "Ultimate bearing capacity, kPa")->required();
  wall->add_option("--fos", wa.in.sliding.required_fos, "Required factor of safety")->capture_default_str();
  wall->callback([&] { action = [&](Session& s) { return run_wall(s, wa); }; });

  double volume = 0, capacity = 0, loss = 0;
  auto* trucks = calc->add_subcommand("trucks", "Truck loads for an earthwork volume");
  trucks->add_option("--volume", volume, "Compacted volume, m^3")->required();
  trucks->add_option("--capacity", capacity, "Truck capacity, m^3")->required();
  trucks->add_option("--loss", loss, "Loss fraction, e.g. 0.10")->capture_default_str();
  trucks->callback([&] { action = [&](Session& s) { return run_trucks(s, volume, capacity, loss); }; });

  std::vector<std::string> terms;
  double claimed = 0, tolerance = kDefaultAuditTolerance;
  auto* audit = calc->add_subcommand("audit", "Recompute a linear numeric claim");
  audit->add_option("--term", terms, "coefficient,factor (repeatable)")->required();
  audit->add_option("--claimed", claimed, "Claimed total")->required();
  audit->add_option("--tolerance", tolerance, "Absolute tolerance")->capture_default_str();
  audit->callback([&] { action = [&](Session& s) { return run_audit(s, terms, claimed, tolerance); }; });

  std::vector<std::string> index_inputs;
  std::string index_dir;
  std::size_t max_tokens = 200, overlap = 20;
  auto* index_cmd = app.add_subcommand("index", "Chunk, embed and persist documents");
  index_cmd->add_option("inputs", index_inputs, "Files or directories")->required();
  index_cmd->add_option("--out", index_dir, "Index directory")->required();
  index_cmd->add_option("--max-tokens", max_tokens, "Tokens per chunk")->capture_default_str();
  index_cmd->add_option("--overlap", overlap, "Overlap tokens")->capture_default_str();
  index_cmd->callback([&] {
    action = [&](Session& s) { return run_index(s, index_inputs, index_dir, max_tokens, overlap); };
  });

  std::string query;
  std::size_t k = kDefaultTopK, budget = kDefaultTokenBudget;
  auto* search_cmd = app.add_subcommand("search", "Top-k chunks for a query");
  search_cmd->add_option("--index", index_dir, "Index directory")->required();
  search_cmd->add_option("query,--query", query, "Query text")->required();
  search_cmd->add_option("-k,--k", k, "Number of hits")->capture_default_str();
  search_cmd->callback([&] { action = [&](Session& s) { return run_search(s, index_dir, query, k); }; });

  auto* ask_cmd = app.add_subcommand("ask", "Grounded answer; reads questions from stdin without --query");
  ask_cmd->add_option("--index", index_dir, "Index directory")->required();
  ask_cmd->add_option("query,--query", query, "Question");
  ask_cmd->add_option("-k,--k", k, "Chunks retrieved")->capture_default_str();
  ask_cmd->add_option("--budget", budget, "Context token budget")->capture_default_str();
  ask_cmd->callback([&] { action = [&](Session& s) { return run_ask(s, index_dir, query, k, budget); }; });

  auto* diggs_cmd = app.add_subcommand("diggs", "DIGGS plastic-limit XML");
  diggs_cmd->require_subcommand(1);
  std::string trials, diggs_out, diggs_file, concept_name;
  bool automated = false;
  auto* emit = diggs_cmd->add_subcommand("emit", "Emit a plastic limit test fragment");
  emit->add_option("--trials", trials, "Comma-separated water contents, percent")->required();
  emit->add_flag("--automated", automated, "Mark trials as not manual");
  emit->add_option("--out", diggs_out, "Output file (default stdout)");
  emit->callback([&] { action = [&](Session& s) { return run_diggs_emit(s, trials, automated, diggs_out); }; });
  auto* parse = diggs_cmd->add_subcommand("parse", "Read trials back from a fragment");
  parse->add_option("--file", diggs_file, "DIGGS XML file")->required()->check(CLI::ExistingFile);
  parse->callback([&] { action = [&](Session& s) { return run_diggs_parse(s, diggs_file); }; });
  auto* tag = diggs_cmd->add_subcommand("tag", "Curated tag for a concept");
  tag->add_option("concept", concept_name, "Concept, e.g. \"plastic limit\"")->required();
  tag->callback([&] { action = [&](Session& s) { return run_diggs_tag(s, concept_name); }; });

  auto* agent_cmd = app.add_subcommand("agent", "Tool-using agent sessions");
  agent_cmd->require_subcommand(1);
  AgentArgs aa;
  const auto add_agent_options = [&aa](CLI::App* c) {
    c->add_option("--tools", aa.tools, "all or a comma list of tool names")->capture_default_str();
    c->add_option("--report", aa.report, "Soil report the task refers to");
    c->add_option("--report-dir", aa.report_dirs, "Directories searched for reports");
    c->add_option("--memory", aa.memory, "Persistent long-term memory store file");
    c->add_option("--seed", aa.seeds, "Memory files merged in before the run (not written)");
    c->add_option("--max-steps", aa.max_steps, "Model turns per task")->capture_default_str();
  };
  auto* agent_run = agent_cmd->add_subcommand("run", "Run one task");
  agent_run->add_option("--task", aa.task, "Task text")->required();
  agent_run->add_option("--trace-out", aa.trace_out, "Write the structured trace here");
  add_agent_options(agent_run);
  agent_run->callback([&] { action = [&](Session& s) { return run_agent(s, aa); }; });
  auto* agent_repl = agent_cmd->add_subcommand("repl", "Read tasks from stdin, one per line");
  add_agent_options(agent_repl);
  agent_repl->callback([&] { action = [&](Session& s) { return run_agent_repl(s, aa); }; });

  auto* config_cmd = app.add_subcommand("config", "Configuration");
  config_cmd->require_subcommand(1);
  auto* show = config_cmd->add_subcommand("show", "Print defaults and backend settings");
  show->callback([&] { action = [&](Session& s) { return run_config_show(s, config); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    err << "run 'geollm --help' for usage\n";
    return kExitUsage;
  }
  config.mode = json_mode ? OutputMode::kMachine : OutputMode::kHuman;

  Session session(out, err, in, config);
  const auto fail = [&](std::string_view kind, const std::string& message) {
    err << "error (" << kind << "): " << message << "\n";
    if (session.machine()) {
      out << json{{"ok", false}, {"error", {{"kind", kind}, {"message", message}}}}.dump() << "\n";
    }
    return kExitDomainError;
  };
  try {
    return action(session);
  } catch (const Error& e) {
    return fail(to_string(e.kind()), e.what());
  } catch (const json::exception& e) {
    return fail("parse", e.what());
  } catch (const std::exception& e) {
    return fail("internal", e.what());
  }
}

}  // namespace geollm::cli
