#include "doctest.h"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "geollm/cli.hpp"
#include "support.hpp"

namespace {

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args, const std::string& input = "") {
  args.insert(args.begin(), "geollm");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  std::istringstream in(input);
  Run r;
  r.code = geollm::cli::dispatch(static_cast<int>(argv.size()), argv.data(), out, err, in);
  r.out = out.str();
  r.err = err.str();
  return r;
}

nlohmann::json one_record(const Run& r) {
  REQUIRE(!r.out.empty());
  CHECK(r.out.find('\n') == r.out.size() - 1);
  return nlohmann::json::parse(r.out);
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

std::string scripted(const char* session) {
  return "scripted:" + (testing::fixtures() / "sessions" / session).string();
}

}  // namespace

TEST_CASE("calc commands") {
  const auto ml = cli({"calc", "maxload", "--qf", "199.689", "--diameter", "20", "--depth", "5"});
  CHECK(ml.code == 0);
  CHECK(ml.out.find("98022") != std::string::npos);

  const auto j = one_record(cli({"--json", "calc", "bearing", "--su", "35", "--shape", "circular"}));
  CHECK(j["ok"] == true);
  CHECK(j["command"] == "calc bearing");
  CHECK(j["q_f"].get<double>() == doctest::Approx(199.689));

  CHECK(one_record(cli({"--json", "calc", "trucks", "--volume", "220", "--capacity", "10"}))["trucks"] == 22);

  const auto audit = cli({"calc", "audit", "--term", "1,100", "--claimed", "150"});
  CHECK(audit.code == geollm::cli::kExitDomainError);
}

TEST_CASE("classify") {
  const auto r = cli({"classify", "--pass200", "60", "--ll", "40", "--pl", "20"});
  CHECK(r.code == 0);
  CHECK(r.out.find("CL") != std::string::npos);
  const auto j = one_record(cli({"--json", "classify", "--pass200", "60", "--ll", "60", "--pl", "40"}));
  CHECK(j["symbol"] == "MH");
  const auto missing = cli({"classify", "--pass200", "60"});
  CHECK(missing.code == geollm::cli::kExitDomainError);
  CHECK(missing.err.find("error (") == 0);
}

TEST_CASE("usage and domain errors are distinct") {
  CHECK(cli({"no-such-command"}).code == geollm::cli::kExitUsage);
  CHECK(cli({"calc", "maxload", "--qf", "abc", "--depth", "5"}).code == geollm::cli::kExitUsage);
  CHECK(cli({"calc", "maxload", "--qf", "100", "--diameter", "-2", "--depth", "5"}).code ==
        geollm::cli::kExitDomainError);
  const auto j = cli({"--json", "calc", "maxload", "--qf", "100", "--diameter", "-2", "--depth", "5"});
  const auto rec = nlohmann::json::parse(j.out);
  CHECK(rec["ok"] == false);
  CHECK(rec["error"].contains("kind"));
}

TEST_CASE("config show never prints the credential") {
  const std::string sentinel = "sk-sentinel-0c4f2e91d7";
  setenv("OPENAI_API_KEY", sentinel.c_str(), 1);
  const auto r = cli({"--json", "config", "show"});
  CHECK(r.code == 0);
  CHECK(r.out.find(sentinel) == std::string::npos);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["api_key_present"] == true);
  CHECK(j["defaults"]["max_steps"] == 10);
  unsetenv("OPENAI_API_KEY");
}

TEST_CASE("agent run with a scripted backend") {
  const std::string sentinel = "sk-sentinel-5b81aa03e6";
  setenv("OPENAI_API_KEY", sentinel.c_str(), 1);
  testing::TempDir dir("cli-agent");
  std::filesystem::copy_file(testing::fixtures() / "memory" / "pisa_memory.json", dir / "memory.json");
  const auto r = cli({"--backend", scripted("pisa.txt"), "agent", "run", "--task",
                      "Maximum load on the clay layer", "--report-dir",
                      (testing::fixtures() / "reports").string(), "--memory",
                      (dir / "memory.json").string(), "--trace-out", (dir / "trace.json").string()});
  CHECK(r.code == 0);
  CHECK(r.out.find("98.022 MN") != std::string::npos);
  const auto trace = nlohmann::json::parse(slurp(dir / "trace.json"));
  CHECK(trace["succeeded"] == true);
  const auto memory = nlohmann::json::parse(slurp(dir / "memory.json"));
  CHECK(memory.dump().find("max_load") != std::string::npos);
  for (const auto* text : {&r.out, &r.err}) CHECK(text->find(sentinel) == std::string::npos);
  CHECK(slurp(dir / "trace.json").find(sentinel) == std::string::npos);
  CHECK(slurp(dir / "memory.json").find(sentinel) == std::string::npos);
  unsetenv("OPENAI_API_KEY");

  const auto fail = cli({"--backend", scripted("never_final.txt"), "agent", "run", "--task", "x",
                         "--max-steps", "2"});
  CHECK(fail.code == geollm::cli::kExitDomainError);
}

TEST_CASE("diggs commands") {
  testing::TempDir dir("cli-diggs");
  const auto out = (dir / "pl.xml").string();
  CHECK(cli({"diggs", "emit", "--trials", "11.9,11.7,11.4", "--out", out}).code == 0);
  CHECK(slurp(out) == slurp(testing::fixtures() / "diggs" / "plastic_limit_trials.xml"));
  const auto j = one_record(cli({"--json", "diggs", "parse", "--file", out}));
  CHECK(j["trials"].size() == 3);
  const auto tag = one_record(cli({"--json", "diggs", "tag", "plastic limit"}));
  CHECK(tag["parent"] == "diggs_geo:plasticLimitTrial");
}

TEST_CASE("index, search and ask") {
  testing::TempDir dir("cli-index");
  const auto idx = (dir / "idx").string();
  CHECK(cli({"index", (testing::fixtures() / "knowledge").string(), "--out", idx}).code == 0);
  const auto s = one_record(cli({"--json", "search", "plastic limit water content", "--index", idx, "-k", "3"}));
  CHECK(s["hits"].size() == 3);
  const auto a = one_record(cli({"--json", "--backend", scripted("diggs_answer.txt"), "ask", "--query",
                                 "plastic limit tag", "--index", idx}));
  CHECK(a["status"] == "answered");
  CHECK(a["answer"].get<std::string>().find("diggs_geo:waterContent") != std::string::npos);
}
