// One PASS/FAIL line per acceptance criterion. Exit status is the number of
// failures (capped), so ctest fails if any criterion does.

#include <chrono>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "geollm/agent.hpp"
#include "geollm/agent_tools.hpp"
#include "geollm/cli.hpp"
#include "geollm/diggs.hpp"
#include "geollm/error.hpp"
#include "geollm/geotech.hpp"
#include "geollm/retrieval.hpp"
#include "geollm/soil_io.hpp"
#include "geollm/uscs.hpp"
#include "oracles/uscs_table_oracle.hpp"
#include "support.hpp"

using namespace geollm;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

constexpr double kReferenceMaxLoad = 98022.02586093749;  // kN

Outcome pisa_end_to_end() {
  const auto t0 = Clock::now();
  const auto sessions = testing::fixtures() / "sessions";
  const std::string backend = "scripted:" + (sessions / "pisa.txt").string();
  const std::string reports = (testing::fixtures() / "reports").string();
  const std::string seed = (testing::fixtures() / "memory" / "pisa_memory.json").string();
  const char* argv[] = {"geollm", "--json", "--backend", backend.c_str(), "agent", "run",
                        "--task", "Maximum load on the clay layer under the tower",
                        "--report-dir", reports.c_str(), "--seed", seed.c_str()};
  std::ostringstream out, err;
  std::istringstream in;
  const int code = cli::dispatch(static_cast<int>(std::size(argv)), argv, out, err, in);
  const double elapsed = seconds_since(t0);
  if (code != 0) return {false, fmt::format("exit {}: {}", code, err.str())};
  const auto j = nlohmann::json::parse(out.str());
  const auto answer = j.at("final_answer").get<std::string>();
  std::smatch m;
  if (!std::regex_search(answer, m, std::regex(R"(([0-9]+(?:\.[0-9]+)?)\s*MN)"))) {
    return {false, "no MN value in final answer"};
  }
  const double kn = std::stod(m[1]) * 1000.0;
  const double rel = std::abs(kn - kReferenceMaxLoad) / kReferenceMaxLoad;
  double tool_value = 0.0;
  for (const auto& c : j.at("tool_calls")) {
    if (c.at("tool") == "MaxLoad") tool_value = c.at("value").get<double>();
  }
  const double tool_rel = std::abs(tool_value - kReferenceMaxLoad) / kReferenceMaxLoad;
  return {rel <= 1e-4 && tool_rel <= 1e-4 && elapsed < 1.0,
          fmt::format("answer {} kN (rel {:.2e}), MaxLoad tool {:.5f} kN (rel {:.2e}), {:.3f} s", kn,
                      rel, tool_value, tool_rel, elapsed)};
}

Outcome bearing_capacity() {
  const double q = bearing_capacity_undrained(35.0, 1.11).q_f;
  const auto text = fmt::format("{:.3f}", q);
  return {text == "199.689" && std::abs(q - 199.689) < 5e-4, fmt::format("q_f = {} kPa", text)};
}

Outcome classification_goldens() {
  const auto samples = load_samples(testing::fixtures() / "samples" / "worked_examples.txt");
  const std::vector<std::pair<std::string, std::string>> expected = {
      {"fines_mh", "MH"}, {"fines_cl", "CL"}, {"gravel_gw", "GW"}, {"gravel_gw_gm", "GW-GM"}};
  std::string detail;
  bool ok = true;
  for (const auto& [id, symbol] : expected) {
    std::string got = "missing";
    for (const auto& s : samples) {
      if (s.id == id) got = std::string(to_string(classify(s.sample).symbol));
    }
    ok = ok && got == symbol;
    detail += fmt::format("{}={} ", id, got);
  }
  return {ok, detail};
}

Outcome oracle_equivalence() {
  const auto samples = testing::random_samples(20000, 20240601);
  const auto outcomes = classify_batch(samples);
  std::size_t agree = 0, unclassified = 0, disagree = 0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto want = oracle::uscs_symbol(samples[i]);
    if (!outcomes[i].ok()) {
      ++unclassified;
      continue;
    }
    if (want && *want == to_string(outcomes[i].code->symbol)) {
      ++agree;
    } else {
      ++disagree;
    }
  }
  return {agree == samples.size() && agree >= 10000,
          fmt::format("{} samples, {} agree, {} disagree, {} unclassified", samples.size(), agree,
                      disagree, unclassified)};
}

Outcome truck_count_goldens() {
  const auto a = truck_count(500, 25, 0.10);
  const auto b = truck_count(500, 25, 0.0);
  return {a == 22 && b == 20, fmt::format("10% loss -> {}, no loss -> {}", a, b)};
}

Outcome hallucination_audit() {
  const auto r = audit_linear_claim({{15, 1}, {100, 5}, {18.92, 3}}, 734.6);
  return {std::abs(r.recomputed - 571.76) < 1e-9 && !r.matches,
          fmt::format("recomputed {:.2f}, claimed {}, {}", r.recomputed, r.claimed,
                      r.matches ? "match" : "mismatch")};
}

Outcome retrieval_properties() {
  HashEmbedder embedder;
  std::vector<KnowledgeChunk> chunks;
  for (const auto& entry : fs::directory_iterator(testing::fixtures() / "knowledge")) {
    auto c = chunk_document(slurp(entry.path()), entry.path().filename().string(), 40, 5);
    chunks.insert(chunks.end(), c.begin(), c.end());
  }
  std::mt19937 rng(7);
  const char* words[] = {"clay", "sand", "limit", "water", "trial", "sieve", "boring", "silt"};
  for (int i = 0; chunks.size() < 900; ++i) {
    std::string text;
    for (int w = 0; w < 6; ++w) text += std::string(words[rng() % 8]) + " ";
    chunks.push_back({fmt::format("synthetic#{:04}", i), "synthetic", text, estimate_tokens(text)});
  }
  const auto index = VectorIndex::build(chunks, embedder);

  // Verbatim query ranks its chunk first.
  const auto& probe = index.chunks()[3];
  const auto top = index.search(probe.text, embedder, 1);
  const bool verbatim = !top.hits.empty() && std::abs(top.hits[0].score - 1.0) <= 1e-6 &&
                        index.find(top.hits[0].chunk_id)->text == probe.text;

  // Brute force over all rows, sorted by score desc then id.
  bool exact = true;
  for (const char* q : {"plastic limit water content", "sand gravel", "boring log depth"}) {
    const auto qv = embed(embedder, q);
    std::vector<SearchHit> brute;
    for (std::size_t r = 0; r < index.size(); ++r) {
      const auto row = index.vector(r);
      double dot = 0.0;
      for (std::size_t d = 0; d < row.size(); ++d) dot += double(row[d]) * double(qv[d]);
      brute.push_back({index.chunks()[r].id, dot});
    }
    std::stable_sort(brute.begin(), brute.end(), [](const SearchHit& a, const SearchHit& b) {
      return a.score != b.score ? a.score > b.score : a.chunk_id < b.chunk_id;
    });
    brute.resize(10);
    const auto got = index.search(q, embedder, 10);
    exact = exact && got.hits.size() == 10;
    for (std::size_t i = 0; exact && i < 10; ++i) {
      exact = got.hits[i].chunk_id == brute[i].chunk_id &&
              std::abs(got.hits[i].score - brute[i].score) <= 1e-12;
    }
  }

  testing::TempDir dir("acceptance-index");
  index.save(dir.path());
  const auto back = VectorIndex::load(dir.path());
  const auto a = index.vectors(), b = back.vectors();
  const bool persisted = back.chunks() == index.chunks() && a.size() == b.size() &&
                         std::equal(a.begin(), a.end(), b.begin(), [](float x, float y) {
                           return std::memcmp(&x, &y, sizeof x) == 0;
                         });
  return {verbatim && exact && persisted,
          fmt::format("{} chunks; verbatim top-1 {}, brute-force equal {}, round trip {}",
                      index.size(), verbatim, exact, persisted)};
}

Outcome grounded_answer() {
  HashEmbedder embedder;
  std::vector<KnowledgeChunk> chunks;
  for (const auto& entry : fs::directory_iterator(testing::fixtures() / "knowledge")) {
    auto c = chunk_document(slurp(entry.path()), entry.path().filename().string(), 200, 20);
    chunks.insert(chunks.end(), c.begin(), c.end());
  }
  const auto index = VectorIndex::build(chunks, embedder);
  auto backend = ScriptedBackend::from_file(testing::fixtures() / "sessions" / "diggs_answer.txt");
  const auto a = answer(index, embedder, *backend,
                        "What is the DIGGS XML tag for the water content of a plastic limit trial?");
  const bool context_ok = a.prompt.find("plasticLimitTrial") != std::string::npos;
  const bool answered = a.status == AnswerStatus::kAnswered &&
                        a.text.find("diggs_geo:waterContent") != std::string::npos &&
                        a.text.find("diggs_geo:plasticLimitTrial") != std::string::npos;
  const auto tag = diggs::tag_for("plastic limit");
  const bool curated = tag.parent == "diggs_geo:plasticLimitTrial" &&
                       tag.child == "diggs_geo:waterContent";

  ScriptedBackend untouched({"should not be used"});
  const VectorIndex empty(embedder.id(), embedder.dimension());
  const auto refused = answer(empty, embedder, untouched, "plastic limit tag?");
  const bool refuses = refused.status == AnswerStatus::kNoContext && untouched.calls() == 0;
  return {answered && context_ok && curated && refuses,
          fmt::format("answered {}, context has tag {}, curated {}, empty index refuses {}",
                      answered, context_ok, curated, refuses)};
}

Outcome diggs_round_trip() {
  const auto xml = diggs::emit_plastic_limit_xml({{11.9, 11.7, 11.4}, true});
  bool ids = true;
  for (int n = 1; n <= 3; ++n) {
    ids = ids && xml.find(fmt::format("gml:id=\"tr{}\"", n)) != std::string::npos &&
          xml.find(fmt::format("<diggs_geo:trialNo>{}</diggs_geo:trialNo>", n)) != std::string::npos;
  }
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> wc(0.0, 200.0);
  int failures = 0;
  for (int i = 0; i < 1000; ++i) {
    diggs::PlasticLimitTrialSet set;
    set.is_manual = rng() % 2 == 0;
    const auto n = 1 + rng() % 8;
    for (std::size_t t = 0; t < n; ++t) set.trials.push_back(wc(rng));
    if (diggs::parse_plastic_limit_xml(diggs::emit_plastic_limit_xml(set)) != set) ++failures;
  }
  return {ids && failures == 0,
          fmt::format("ids/trialNo {}, {} of 1000 random sets failed to round trip", ids, failures)};
}

agent::AgentTrace run_script(const char* name, std::size_t max_steps) {
  agent::GeotechToolOptions options;
  options.report_dirs = {testing::fixtures() / "reports"};
  auto memory = MemoryStore::load(testing::fixtures() / "memory" / "pisa_memory.json");
  auto backend = ScriptedBackend::from_file(testing::fixtures() / "sessions" / name);
  agent::AgentOptions opt;
  opt.max_steps = max_steps;
  return agent::run("task", agent::geotech_registry(options), memory, *backend, opt);
}

Outcome agent_robustness() {
  const auto unknown = run_script("unknown_tool.txt", agent::kDefaultMaxSteps);
  const auto malformed = run_script("malformed.txt", agent::kDefaultMaxSteps);
  const auto capped = run_script("never_final.txt", 3);
  const bool recovered = unknown.succeeded() && malformed.succeeded();
  const bool bounded = !capped.succeeded() && capped.step_count == 3;
  bool identical = true;
  for (const char* s : {"pisa.txt", "unknown_tool.txt", "malformed.txt"}) {
    const auto a = run_script(s, agent::kDefaultMaxSteps);
    const auto b = run_script(s, agent::kDefaultMaxSteps);
    identical = identical && a.render_text() == b.render_text() &&
                a.to_json().dump() == b.to_json().dump();
  }
  return {recovered && bounded && identical,
          fmt::format("recovered {}, step cap honoured {}, byte-identical reruns {}", recovered,
                      bounded, identical)};
}

Outcome wall_properties() {
  const double B = 3.0, V = 150.0;
  const bool centred = wall_eccentricity(0.0, V, B).middle_third_ok;
  const bool boundary = wall_eccentricity(V * B / 6.0, V, B).middle_third_ok &&
                        wall_eccentricity(-V * B / 6.0, V, B).middle_third_ok;
  const bool beyond = !wall_eccentricity(V * (B / 6.0 + 1e-6), V, B).middle_third_ok;
  const bool fos = wall_sliding_fos(125.0, 100.0).ok && !wall_sliding_fos(124.99, 100.0).ok;
  // Hand calculation: V = 150, B = 3, e = 0.25 -> 150 / 2.5 = 60 kPa.
  const auto bearing = wall_bearing_check(V, B, 0.25, 300.0);
  const bool meyerhof = std::abs(bearing.q - 60.0) <= 1e-9 && std::abs(bearing.effective_width - 2.5) <= 1e-9;
  return {centred && boundary && beyond && fos && meyerhof,
          fmt::format("e=0 {}, |e|=B/6 {}, beyond rejected {}, FoS 1.25 gate {}, q {:.12f}", centred,
                      boundary, beyond, fos, bearing.q)};
}

}  // namespace

int main() {
  const auto start = Clock::now();
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"Pisa end-to-end agent run", pisa_end_to_end},
      {"undrained bearing capacity", bearing_capacity},
      {"classification goldens", classification_goldens},
      {"classifier agrees with table oracle", oracle_equivalence},
      {"truck count", truck_count_goldens},
      {"linear claim audit", hallucination_audit},
      {"retrieval ranking and persistence", retrieval_properties},
      {"grounded DIGGS answer and refusal", grounded_answer},
      {"DIGGS emit/parse round trip", diggs_round_trip},
      {"agent robustness and determinism", agent_robustness},
      {"retaining-wall checks", wall_properties},
  };
  int failures = 0;
  int n = 0;
  for (const auto& [name, check] : criteria) {
    ++n;
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::cout << fmt::format("{} criterion {}: {} ({})\n", o.pass ? "PASS" : "FAIL", n, name, o.detail);
  }
  // Everything above used the scripted backend and local fixtures only.
  const double total = seconds_since(start);
  const bool fast = total < 60.0;
  if (!fast) ++failures;
  std::cout << fmt::format("{} criterion 12: offline run time ({:.2f} s, limit 60 s)\n",
                           fast ? "PASS" : "FAIL", total);
  return std::min(failures, 100);
}
