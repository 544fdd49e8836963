#include "geollm/agent.hpp"

#include <algorithm>
#include <cctype>

#include <fmt/format.h>

#include "geollm/error.hpp"
#include "geollm/text_util.hpp"

namespace geollm::agent {

namespace {

enum class Label { kNone, kThought, kActionTool, kActionInput, kAction, kObservation, kFinal };

struct LabelSpec {
  std::string_view text;
  Label label;
};

// Longer labels first so "Action Tool:" is not read as "Action:".
constexpr LabelSpec kLabels[] = {
    {"Action Tool:", Label::kActionTool}, {"Action Input:", Label::kActionInput},
    {"Final Answer:", Label::kFinal},     {"Observation:", Label::kObservation},
    {"Thought:", Label::kThought},        {"Action:", Label::kAction},
};

struct Segment {
  Label label = Label::kNone;
  std::string text;
};

std::string_view trim_left(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  return s;
}

std::vector<Segment> segment(std::string_view output) {
  std::vector<Segment> segments;
  for (const auto& raw : split(output, '\n')) {
    std::string_view line = raw;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    const auto lead = trim_left(line);
    Label label = Label::kNone;
    std::string_view rest;
    for (const auto& spec : kLabels) {
      if (starts_with(lead, spec.text)) {
        label = spec.label;
        rest = lead.substr(spec.text.size());
        break;
      }
    }
    if (label != Label::kNone) {
      segments.push_back({label, std::string(rest)});
    } else if (segments.empty()) {
      segments.push_back({Label::kNone, std::string(line)});
    } else {
      segments.back().text += '\n';
      segments.back().text += line;
    }
  }
  for (auto& s : segments) s.text = std::string(trim(s.text));
  return segments;
}

std::string join_thoughts(const std::vector<Segment>& segments, std::size_t end) {
  std::string out;
  for (std::size_t i = 0; i < end; ++i) {
    const auto& s = segments[i];
    if ((s.label == Label::kThought || s.label == Label::kNone) && !s.text.empty()) {
      if (!out.empty()) out += '\n';
      out += s.text;
    }
  }
  return out;
}

bool is_ident_char(unsigned char c) { return std::isalnum(c) || c == '_' || c >= 0x80; }

std::size_t scan_number(std::string_view s, std::size_t i) {
  const std::size_t start = i;
  if (i < s.size() && (s[i] == '-' || s[i] == '+')) ++i;
  const std::size_t digits = i;
  while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
  if (i < s.size() && s[i] == '.') {
    ++i;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
  }
  if (i == digits || (i == digits + 1 && s[digits] == '.')) return start;
  if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
    std::size_t j = i + 1;
    if (j < s.size() && (s[j] == '-' || s[j] == '+')) ++j;
    const std::size_t exp_digits = j;
    while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
    if (j > exp_digits) i = j;
  }
  return i;
}

}  // namespace

const char* to_string(StepKind kind) {
  switch (kind) {
    case StepKind::kThought: return "thought";
    case StepKind::kAction: return "action";
    case StepKind::kObservation: return "observation";
    case StepKind::kFinal: return "final";
  }
  return "unknown";
}

std::vector<std::pair<std::string, std::string>> parse_named_values(std::string_view text) {
  std::vector<std::pair<std::string, std::string>> out;
  std::size_t i = 0;
  while (i < text.size()) {
    const auto c = static_cast<unsigned char>(text[i]);
    if (!is_ident_char(c) || std::isdigit(c) || (i > 0 && is_ident_char(text[i - 1]))) {
      ++i;
      continue;
    }
    const std::size_t key_start = i;
    while (i < text.size() && is_ident_char(static_cast<unsigned char>(text[i]))) ++i;
    const auto key = text.substr(key_start, i - key_start);
    std::size_t j = i;
    while (j < text.size() && (text[j] == ' ' || text[j] == '\t')) ++j;
    if (j >= text.size() || (text[j] != '=' && text[j] != ':')) continue;
    const bool tight = j == i && text[j] == '=';
    std::size_t v = j + 1;
    while (v < text.size() && (text[v] == ' ' || text[v] == '\t')) ++v;
    const std::size_t number_end = scan_number(text, v);
    if (number_end > v) {
      out.emplace_back(std::string(key), std::string(text.substr(v, number_end - v)));
      i = number_end;
    } else if (tight && v == j + 1 && v < text.size()) {
      std::size_t end = v;
      while (end < text.size() && !std::isspace(static_cast<unsigned char>(text[end])) &&
             text[end] != ',' && text[end] != ';' && text[end] != ')') {
        ++end;
      }
      if (end > v) out.emplace_back(std::string(key), std::string(text.substr(v, end - v)));
      i = end;
    }
  }
  return out;
}

ReActStep parse_step(std::string_view model_output) {
  const auto segments = segment(model_output);
  if (trim(model_output).empty()) {
    throw ProtocolError("model output is empty", std::string(model_output));
  }
  const auto first = std::find_if(segments.begin(), segments.end(), [](const Segment& s) {
    return s.label == Label::kActionTool || s.label == Label::kFinal ||
           s.label == Label::kActionInput;
  });
  if (first != segments.end()) {
    const auto index = static_cast<std::size_t>(first - segments.begin());
    ReActStep step;
    step.thought = join_thoughts(segments, index);
    if (first->label == Label::kFinal) {
      step.kind = StepKind::kFinal;
      step.text = first->text;
      return step;
    }
    if (first->label == Label::kActionInput) {
      throw ProtocolError("'Action Input:' without a preceding 'Action Tool:'",
                          std::string(model_output));
    }
    if (first->text.empty() || first->text.find('\n') != std::string::npos) {
      throw ProtocolError("'Action Tool:' must name exactly one tool on its line",
                          std::string(model_output));
    }
    const auto next = first + 1;
    if (next == segments.end() || next->label != Label::kActionInput) {
      throw ProtocolError("'Action Tool:' must be followed by 'Action Input:'",
                          std::string(model_output));
    }
    step.kind = StepKind::kAction;
    step.tool = first->text;
    step.input = next->text;
    for (auto& [k, v] : parse_named_values(step.input)) step.parsed_inputs.emplace(k, v);
    return step;
  }
  const auto obs = std::find_if(segments.begin(), segments.end(),
                                [](const Segment& s) { return s.label == Label::kObservation; });
  if (obs != segments.end()) {
    ReActStep step;
    step.kind = StepKind::kObservation;
    step.text = obs->text;
    for (auto it = segments.begin(); it != obs; ++it) {
      if (it->label == Label::kAction) step.narration = it->text;
    }
    return step;
  }
  const bool has_thought = std::any_of(segments.begin(), segments.end(),
                                       [](const Segment& s) { return s.label == Label::kThought; });
  if (has_thought) {
    ReActStep step;
    step.kind = StepKind::kThought;
    step.text = join_thoughts(segments, segments.size());
    return step;
  }
  throw ProtocolError("model output matches neither an action nor a final answer",
                      std::string(model_output));
}

std::string render_step(const ReActStep& step) {
  std::string out;
  switch (step.kind) {
    case StepKind::kThought:
      return "Thought: " + step.text;
    case StepKind::kAction:
      if (!step.thought.empty()) out += "Thought: " + step.thought + "\n";
      out += "Action Tool: " + step.tool + "\nAction Input: " + step.input;
      return out;
    case StepKind::kObservation:
      if (!step.narration.empty()) out += "Action: " + step.narration + "\n";
      out += "Observation: " + step.text;
      return out;
    case StepKind::kFinal:
      if (!step.thought.empty()) out += "Thought: " + step.thought + "\n";
      out += "Final Answer: " + step.text;
      return out;
  }
  return out;
}

std::optional<MemoryRecord> ToolContext::read(const std::string& key) {
  auto rec = memory_.get(key);
  (rec ? record_.reads : record_.read_misses).push_back(key);
  return rec;
}

void ToolContext::write(const std::string& key, double value, std::string unit) {
  memory_.put(key, value, std::move(unit), provenance_);
  record_.writes.push_back(key);
}

void ToolRegistry::register_tool(ToolSpec spec) {
  if (spec.name.empty()) throw RegistrationError("tool name must be non-empty");
  if (spec.name.find_first_of(" \t\n") != std::string::npos) {
    throw RegistrationError(fmt::format("tool name '{}' contains whitespace", spec.name));
  }
  if (find(spec.name) != nullptr) {
    throw RegistrationError(fmt::format("tool '{}' is already registered", spec.name));
  }
  if (trim(spec.description).empty()) {
    throw RegistrationError(fmt::format("tool '{}' needs a description", spec.name));
  }
  if (!spec.execute) throw RegistrationError(fmt::format("tool '{}' has no executor", spec.name));
  tools_.push_back(std::move(spec));
}

const ToolSpec* ToolRegistry::find(std::string_view name) const {
  for (const auto& t : tools_) {
    if (t.name == name) return &t;
  }
  return nullptr;
}

std::vector<std::string> ToolRegistry::names() const {
  std::vector<std::string> out;
  for (const auto& t : tools_) out.push_back(t.name);
  return out;
}

std::string ToolRegistry::describe() const {
  std::string out;
  for (const auto& t : tools_) {
    out += fmt::format("- {}: {}", t.name, t.description);
    if (!t.parameters.empty()) {
      out += " Inputs:";
      for (std::size_t i = 0; i < t.parameters.size(); ++i) {
        out += fmt::format("{} {} ({})", i == 0 ? "" : ",", t.parameters[i].name,
                           t.parameters[i].semantic_type);
      }
      out += ".";
    }
    out += "\n";
  }
  return out;
}

const std::string_view kFormatReminder =
    "Reply with an optional 'Thought: <reasoning>' line followed by either an "
    "'Action Tool: <tool name>' line and an 'Action Input: <input>' line, or a "
    "'Final Answer: <answer>' line.";

CompletionRequest render_prompt(std::string_view task, const ToolRegistry& registry,
                                const MemoryStore& memory, const std::vector<ReActStep>& steps,
                                const AgentOptions& options) {
  std::string system =
      "You are a geotechnical engineering assistant. Solve the task by calling the tools "
      "below; never compute engineering quantities yourself. Tool results arrive as "
      "Observation lines.\n\nTools:\n";
  system += registry.describe();
  system +=
      "\nFormat:\n"
      "Thought: <reasoning>\n"
      "Action Tool: <tool name>\n"
      "Action Input: <input for the tool>\n"
      "or\n"
      "Thought: <reasoning>\n"
      "Final Answer: <answer>\n";
  system += kFormatReminder;

  std::string user = fmt::format("Task: {}\n\nLong-term memory:\n", task);
  const auto entries = memory.entries();
  if (entries.empty()) user += "(empty)\n";
  for (const auto& [key, rec] : entries) {
    user += fmt::format("- {} = {}{}{} (source: {})\n", key, format_compact(rec.value),
                        rec.unit.empty() ? "" : " ", rec.unit, rec.provenance);
  }
  user += "\nScratchpad:\n";
  for (const auto& s : steps) user += render_step(s) + "\n";

  CompletionRequest request;
  request.temperature = options.temperature;
  request.max_output_tokens = options.max_output_tokens;
  request.messages = {{"system", std::move(system)}, {"user", std::move(user)}};
  return request;
}

AgentTrace run(std::string_view task, const ToolRegistry& registry, MemoryStore& memory,
               CompletionBackend& backend, const AgentOptions& options) {
  if (registry.empty()) throw ValidationError("agent needs at least one registered tool");
  if (options.max_steps == 0) throw ValidationError("max_steps must be > 0");
  AgentTrace trace;
  trace.task = std::string(task);
  for (const auto& [key, rec] : memory.entries()) trace.seeded_keys.push_back(key);

  const auto observe = [&](std::string text, std::string narration = {}) {
    ReActStep obs;
    obs.kind = StepKind::kObservation;
    obs.text = std::move(text);
    obs.narration = std::move(narration);
    trace.steps.push_back(std::move(obs));
  };

  while (trace.step_count < options.max_steps) {
    const auto request = render_prompt(task, registry, memory, trace.steps, options);
    std::string output;
    try {
      output = backend.complete(request);
    } catch (const Error& e) {
      trace.error = e.what();
      return trace;
    }
    ++trace.step_count;

    ReActStep step;
    try {
      step = parse_step(output);
    } catch (const ProtocolError& e) {
      observe(fmt::format("Protocol error: {}. {}", e.what(), kFormatReminder));
      continue;
    }

    switch (step.kind) {
      case StepKind::kFinal:
        trace.final_answer = step.text;
        trace.steps.push_back(std::move(step));
        return trace;
      case StepKind::kThought:
        trace.steps.push_back(std::move(step));
        break;
      case StepKind::kObservation:
        observe(fmt::format("Protocol error: observations come from tools, not from you. {}",
                            kFormatReminder));
        break;
      case StepKind::kAction: {
        ToolCallRecord record;
        record.step = trace.step_count;
        record.tool = step.tool;
        record.input = step.input;
        const ToolSpec* tool = registry.find(step.tool);
        trace.steps.push_back(step);
        if (tool == nullptr) {
          record.error = true;
          record.observation = fmt::format("unknown tool '{}'. Available tools: {}", step.tool,
                                           fmt::join(registry.names(), ", "));
          observe(record.observation);
        } else {
          ToolContext context(memory, "tool:" + tool->name, record);
          try {
            auto result = tool->execute(step.input, context);
            record.observation = result.observation;
            record.value = result.value;
            record.unit = result.unit;
            observe(std::move(result.observation), std::move(result.narration));
          } catch (const std::exception& e) {
            record.error = true;
            record.observation = fmt::format("Error: {}", e.what());
            observe(record.observation);
          }
        }
        trace.tool_calls.push_back(std::move(record));
        break;
      }
    }
  }
  return trace;
}

std::string AgentTrace::render_text() const {
  std::string out = fmt::format("Task: {}\n", task);
  for (const auto& s : steps) out += render_step(s) + "\n";
  if (!succeeded()) {
    out += error.empty()
               ? fmt::format("[no final answer after {} step(s)]\n", step_count)
               : fmt::format("[stopped after {} step(s): {}]\n", step_count, error);
  }
  return out;
}

nlohmann::json AgentTrace::to_json() const {
  auto steps_json = nlohmann::json::array();
  for (const auto& s : steps) {
    nlohmann::json j{{"kind", to_string(s.kind)}};
    if (!s.text.empty()) j["text"] = s.text;
    if (!s.thought.empty()) j["thought"] = s.thought;
    if (s.kind == StepKind::kAction) {
      j["tool"] = s.tool;
      j["input"] = s.input;
      j["parsed_inputs"] = s.parsed_inputs;
    }
    if (!s.narration.empty()) j["narration"] = s.narration;
    steps_json.push_back(std::move(j));
  }
  auto calls = nlohmann::json::array();
  for (const auto& c : tool_calls) {
    nlohmann::json j{{"step", c.step},          {"tool", c.tool},
                     {"input", c.input},        {"observation", c.observation},
                     {"reads", c.reads},        {"read_misses", c.read_misses},
                     {"writes", c.writes},      {"error", c.error}};
    if (c.value) {
      j["value"] = *c.value;
      j["unit"] = c.unit;
    }
    calls.push_back(std::move(j));
  }
  nlohmann::json j{{"task", task},
                   {"succeeded", succeeded()},
                   {"step_count", step_count},
                   {"steps", steps_json},
                   {"tool_calls", calls},
                   {"seeded_keys", seeded_keys}};
  j["final_answer"] = final_answer ? nlohmann::json(*final_answer) : nlohmann::json(nullptr);
  if (!error.empty()) j["error"] = error;
  return j;
}

}  // namespace geollm::agent
