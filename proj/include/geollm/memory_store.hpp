#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

namespace geollm {

struct MemoryRecord {
  double value = 0.0;
  std::string unit;
  std::string provenance;  // writer, e.g. "tool:SoilReport" or "seed"
  std::uint64_t sequence = 0;  // logical write clock, monotone per store

  bool operator==(const MemoryRecord&) const = default;
};

// Long-term memory shared by every tool of an agent session. Keys are flat
// strings; the last write wins. Writes are serialized; reads see every
// completed write.
class MemoryStore {
 public:
  MemoryStore() = default;
  MemoryStore(const MemoryStore& other);
  MemoryStore& operator=(const MemoryStore& other);

  // Missing files yield an empty store.
  static MemoryStore load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;

  void put(const std::string& key, double value, std::string unit, std::string provenance);
  // nullopt is an explicit miss.
  std::optional<MemoryRecord> get(const std::string& key) const;
  bool contains(const std::string& key) const;
  std::size_t size() const;

  // Sorted by key.
  std::vector<std::pair<std::string, MemoryRecord>> entries() const;

  nlohmann::json to_json() const;
  static MemoryStore from_json(const nlohmann::json& j);

 private:
  mutable std::mutex mutex_;
  std::map<std::string, MemoryRecord> records_;
  std::uint64_t clock_ = 0;
};

}  // namespace geollm
