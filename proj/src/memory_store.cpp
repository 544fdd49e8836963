#include "geollm/memory_store.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "geollm/error.hpp"
#include "geollm/text_util.hpp"

namespace geollm {

MemoryStore::MemoryStore(const MemoryStore& other) {
  std::lock_guard lock(other.mutex_);
  records_ = other.records_;
  clock_ = other.clock_;
}

MemoryStore& MemoryStore::operator=(const MemoryStore& other) {
  if (this == &other) return *this;
  std::scoped_lock lock(mutex_, other.mutex_);
  records_ = other.records_;
  clock_ = other.clock_;
  return *this;
}

void MemoryStore::put(const std::string& key, double value, std::string unit,
                      std::string provenance) {
  if (key.empty()) throw ValidationError("memory key must be non-empty");
  std::lock_guard lock(mutex_);
  records_[key] = MemoryRecord{value, std::move(unit), std::move(provenance), ++clock_};
}

std::optional<MemoryRecord> MemoryStore::get(const std::string& key) const {
  std::lock_guard lock(mutex_);
  auto it = records_.find(key);
  if (it == records_.end()) return std::nullopt;
  return it->second;
}

bool MemoryStore::contains(const std::string& key) const { return get(key).has_value(); }

std::size_t MemoryStore::size() const {
  std::lock_guard lock(mutex_);
  return records_.size();
}

std::vector<std::pair<std::string, MemoryRecord>> MemoryStore::entries() const {
  std::lock_guard lock(mutex_);
  return {records_.begin(), records_.end()};
}

nlohmann::json MemoryStore::to_json() const {
  std::lock_guard lock(mutex_);
  nlohmann::json entries = nlohmann::json::object();
  for (const auto& [key, r] : records_) {
    entries[key] = {{"value", r.value},
                    {"unit", r.unit},
                    {"provenance", r.provenance},
                    {"sequence", r.sequence}};
  }
  return {{"version", 1}, {"clock", clock_}, {"entries", entries}};
}

MemoryStore MemoryStore::from_json(const nlohmann::json& j) {
  MemoryStore store;
  try {
    for (const auto& [key, r] : j.at("entries").items()) {
      if (key.empty()) throw ParseError("memory store contains an empty key");
      MemoryRecord rec{r.at("value").get<double>(), r.value("unit", std::string{}),
                       r.value("provenance", std::string{"seed"}),
                       r.value("sequence", std::uint64_t{0})};
      store.clock_ = std::max(store.clock_, rec.sequence);
      store.records_.emplace(key, std::move(rec));
    }
    store.clock_ = std::max(store.clock_, j.value("clock", std::uint64_t{0}));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(fmt::format("malformed memory store: {}", e.what()));
  }
  return store;
}

MemoryStore MemoryStore::load(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) return {};
  try {
    return from_json(nlohmann::json::parse(read_file(path)));
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(fmt::format("memory store {} is not valid JSON: {}", path.string(), e.what()));
  }
}

void MemoryStore::save(const std::filesystem::path& path) const {
  write_file_atomic(path, to_json().dump(2) + "\n");
}

}  // namespace geollm
