#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "geollm/llm_backend.hpp"
#include "geollm/memory_store.hpp"

namespace geollm::agent {

inline constexpr std::size_t kDefaultMaxSteps = 10;

enum class StepKind { kThought, kAction, kObservation, kFinal };

const char* to_string(StepKind kind);

struct ReActStep {
  StepKind kind = StepKind::kThought;
  // Thought, observation or final-answer text. Empty for actions.
  std::string text;
  // Reasoning that preceded an action or final answer in the same output.
  std::string thought;
  // Action fields.
  std::string tool;
  std::string input;
  std::map<std::string, std::string> parsed_inputs;
  // Observation only: the tool's narration of what it did.
  std::string narration;

  bool operator==(const ReActStep&) const = default;
};

// Grammar, one step per model output (labels case-sensitive at line start,
// surrounding whitespace ignored):
//   [Thought: ...]* Action Tool: <name> / Action Input: <text, may span lines>
//   [Thought: ...]* Final Answer: <text>
//   [Action: <narration>] Observation: <text>
//   Thought: <text>
// Untagged text before the first label counts as thought. Anything after an
// action's input block (e.g. an invented Observation) is discarded. Throws
// ProtocolError carrying the raw output when neither form matches.
ReActStep parse_step(std::string_view model_output);
std::string render_step(const ReActStep& step);

// name=value and "name = 35 kPa" style pairs found anywhere in free text.
std::vector<std::pair<std::string, std::string>> parse_named_values(std::string_view text);

struct ToolCallRecord {
  std::size_t step = 0;  // 1-based model turn
  std::string tool;
  std::string input;
  std::string observation;
  std::vector<std::string> reads;        // keys found in memory
  std::vector<std::string> read_misses;  // keys looked up but absent
  std::vector<std::string> writes;
  std::optional<double> value;
  std::string unit;
  bool error = false;
};

// Handed to a tool while it runs: memory access with per-call logging.
class ToolContext {
 public:
  ToolContext(MemoryStore& memory, std::string provenance, ToolCallRecord& record)
      : memory_(memory), provenance_(std::move(provenance)), record_(record) {}

  std::optional<MemoryRecord> read(const std::string& key);
  void write(const std::string& key, double value, std::string unit);

 private:
  MemoryStore& memory_;
  std::string provenance_;
  ToolCallRecord& record_;
};

struct ToolResult {
  std::string observation;
  std::string narration;
  std::optional<double> value;
  std::string unit;
};

using ToolExecutor = std::function<ToolResult(std::string_view input, ToolContext& context)>;

struct ToolParameter {
  std::string name;
  std::string semantic_type;
};

struct ToolSpec {
  std::string name;
  std::string description;
  std::vector<ToolParameter> parameters;
  ToolExecutor execute;
};

class ToolRegistry {
 public:
  // Throws RegistrationError on a duplicate or empty name, empty description
  // or missing executor.
  void register_tool(ToolSpec spec);

  const ToolSpec* find(std::string_view name) const;
  const std::vector<ToolSpec>& tools() const { return tools_; }
  bool empty() const { return tools_.empty(); }
  std::vector<std::string> names() const;
  // Tool list as shown to the model.
  std::string describe() const;

 private:
  std::vector<ToolSpec> tools_;
};

struct AgentTrace {
  std::string task;
  std::vector<ReActStep> steps;
  std::optional<std::string> final_answer;
  std::size_t step_count = 0;  // model turns consumed
  std::vector<ToolCallRecord> tool_calls;
  std::vector<std::string> seeded_keys;  // memory keys present before the run
  std::string error;                     // backend failure that ended the run

  bool succeeded() const { return final_answer.has_value(); }
  // Transcript in Action / Observation / Thought form.
  std::string render_text() const;
  nlohmann::json to_json() const;
};

struct AgentOptions {
  std::size_t max_steps = kDefaultMaxSteps;
  double temperature = 0.0;
  int max_output_tokens = 512;
};

extern const std::string_view kFormatReminder;

CompletionRequest render_prompt(std::string_view task, const ToolRegistry& registry,
                                const MemoryStore& memory, const std::vector<ReActStep>& steps,
                                const AgentOptions& options = {});

// Runs the Thought / Action / Observation loop until a final answer or
// max_steps model turns. Unknown tools, tool errors and malformed outputs
// become observations. Throws ValidationError for an empty registry.
AgentTrace run(std::string_view task, const ToolRegistry& registry, MemoryStore& memory,
               CompletionBackend& backend, const AgentOptions& options = {});

}  // namespace geollm::agent
