#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "geollm/llm_backend.hpp"

namespace geollm {

inline constexpr std::size_t kDefaultTopK = 5;
inline constexpr std::size_t kDefaultTokenBudget = 32000;

struct KnowledgeChunk {
  std::string id;
  std::string source;
  std::string text;
  std::size_t token_estimate = 0;

  bool operator==(const KnowledgeChunk&) const = default;
};

// Splits text into windows of at most max_tokens (4 characters per token),
// consecutive windows sharing `overlap` tokens. Ids are "<source>#<nnnn>".
// Windows never split a UTF-8 sequence.
std::vector<KnowledgeChunk> chunk_document(std::string_view text, const std::string& source,
                                           std::size_t max_tokens, std::size_t overlap);

// Embeds and L2-normalizes one text.
std::vector<float> embed(EmbeddingBackend& backend, std::string_view text);

struct SearchHit {
  std::string chunk_id;
  double score = 0.0;

  bool operator==(const SearchHit&) const = default;
};

enum class SearchStatus { kOk, kEmptyIndex };

struct SearchResult {
  std::vector<SearchHit> hits;
  SearchStatus status = SearchStatus::kOk;
};

enum class ScanMode { kSerial, kParallel };

// Exhaustive inner-product index over unit vectors. Builds are exclusive;
// const member functions are safe to call concurrently.
class VectorIndex {
 public:
  VectorIndex(std::string embedder_id, std::size_t dimension);

  static VectorIndex build(std::vector<KnowledgeChunk> chunks, EmbeddingBackend& embedder);

  // Embeds and appends chunks. Ids must be unique within the index.
  void add(std::vector<KnowledgeChunk> chunks, EmbeddingBackend& embedder);

  // Top-k chunks by cosine similarity, descending, ties by ascending id.
  SearchResult search(std::string_view query, EmbeddingBackend& embedder,
                      std::size_t k = kDefaultTopK, ScanMode mode = ScanMode::kParallel) const;
  SearchResult search_vector(std::span<const float> unit_query, std::size_t k = kDefaultTopK,
                             ScanMode mode = ScanMode::kParallel) const;

  // Directory layout: manifest.json plus vectors.f32 (row-major float32, little endian).
  void save(const std::filesystem::path& dir) const;
  static VectorIndex load(const std::filesystem::path& dir);

  std::size_t size() const { return chunks_.size(); }
  bool empty() const { return chunks_.empty(); }
  std::size_t dimension() const { return dimension_; }
  const std::string& embedder_id() const { return embedder_id_; }
  const std::vector<KnowledgeChunk>& chunks() const { return chunks_; }
  std::span<const float> vector(std::size_t row) const;
  std::span<const float> vectors() const { return vectors_; }
  // nullptr when absent.
  const KnowledgeChunk* find(std::string_view chunk_id) const;

 private:
  std::string embedder_id_;
  std::size_t dimension_;
  std::vector<KnowledgeChunk> chunks_;
  std::vector<std::string> ids_;
  std::vector<float> vectors_;
};

inline constexpr std::string_view kTruncationMarker = "[truncated]";

struct AssembledContext {
  std::string text;
  std::vector<std::string> chunk_ids;
  std::size_t tokens = 0;
  bool truncated = false;
};

// Concatenates hit texts in rank order while their token estimates fit the
// budget, stopping at the first hit that does not. A top hit larger than the
// whole budget is cut to fit and followed by kTruncationMarker.
AssembledContext assemble_context(const VectorIndex& index, std::span<const SearchHit> hits,
                                  std::size_t token_budget = kDefaultTokenBudget);

enum class AnswerStatus { kAnswered, kNoContext };

struct GroundedAnswer {
  AnswerStatus status = AnswerStatus::kNoContext;
  std::string text;
  std::vector<std::string> chunk_ids;
  std::string prompt;
};

// Retrieves top-k context, renders the fixed question template and asks the
// completion backend at temperature 0. An empty index refuses without calling
// the backend. 10% of the budget is reserved for the template and question.
GroundedAnswer answer(const VectorIndex& index, EmbeddingBackend& embedder,
                      CompletionBackend& completion, std::string_view query,
                      std::size_t k = kDefaultTopK,
                      std::size_t token_budget = kDefaultTokenBudget);

std::string render_answer_prompt(std::string_view context, std::string_view query);
extern const std::string_view kAnswerSystemPrompt;

}  // namespace geollm
