#include "geollm/retrieval.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <set>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "geollm/error.hpp"
#include "geollm/kernels.hpp"
#include "geollm/text_util.hpp"

namespace geollm {

namespace {

constexpr std::string_view kManifestName = "manifest.json";
constexpr std::string_view kVectorsName = "vectors.f32";
constexpr std::string_view kFormat = "geollm-index/1";

// Byte offsets of each code point start, plus the end offset.
std::vector<std::size_t> code_point_offsets(std::string_view text) {
  std::vector<std::size_t> offsets;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if ((static_cast<unsigned char>(text[i]) & 0xC0) != 0x80) offsets.push_back(i);
  }
  offsets.push_back(text.size());
  return offsets;
}

}  // namespace

std::vector<KnowledgeChunk> chunk_document(std::string_view text, const std::string& source,
                                           std::size_t max_tokens, std::size_t overlap) {
  if (max_tokens == 0 || overlap >= max_tokens) {
    throw ValidationError(fmt::format("chunking needs max_tokens > overlap (got {} and {})",
                                      max_tokens, overlap));
  }
  std::vector<KnowledgeChunk> out;
  if (text.empty()) return out;
  const auto offsets = code_point_offsets(text);
  const std::size_t n = offsets.size() - 1;
  const std::size_t window = max_tokens * 4;
  const std::size_t shared = overlap * 4;
  std::size_t start = 0;
  while (true) {
    const std::size_t end = std::min(start + window, n);
    KnowledgeChunk c;
    c.id = fmt::format("{}#{:04}", source, out.size());
    c.source = source;
    c.text = std::string(text.substr(offsets[start], offsets[end] - offsets[start]));
    c.token_estimate = estimate_tokens(c.text);
    out.push_back(std::move(c));
    if (end == n) break;
    start = end - shared;
  }
  return out;
}

std::vector<float> embed(EmbeddingBackend& backend, std::string_view text) {
  if (text.empty()) throw ValidationError("cannot embed empty text");
  auto vectors = backend.embed_batch({std::string(text)});
  if (vectors.size() != 1 || vectors.front().empty()) {
    throw TransportError("embedding backend returned no vector", 0, 1, false);
  }
  auto v = std::move(vectors.front());
  if (!kernels::normalize_rows(v, v.size())) {
    throw ValidationError("embedding backend returned a zero vector");
  }
  return v;
}

VectorIndex::VectorIndex(std::string embedder_id, std::size_t dimension)
    : embedder_id_(std::move(embedder_id)), dimension_(dimension) {}

VectorIndex VectorIndex::build(std::vector<KnowledgeChunk> chunks, EmbeddingBackend& embedder) {
  VectorIndex index(embedder.id(), 0);
  index.add(std::move(chunks), embedder);
  return index;
}

void VectorIndex::add(std::vector<KnowledgeChunk> chunks, EmbeddingBackend& embedder) {
  if (chunks.empty()) return;
  if (embedder.id() != embedder_id_) {
    throw ValidationError(fmt::format("index was built with embedder '{}', not '{}'",
                                      embedder_id_, embedder.id()));
  }
  std::set<std::string_view> seen(ids_.begin(), ids_.end());
  std::vector<std::string> texts;
  texts.reserve(chunks.size());
  for (const auto& c : chunks) {
    if (c.text.empty()) throw ValidationError(fmt::format("chunk '{}' has empty text", c.id));
    if (!seen.insert(c.id).second) {
      throw ValidationError(fmt::format("duplicate chunk id '{}'", c.id));
    }
    texts.push_back(c.text);
  }
  auto raw = embedder.embed_batch(texts);
  if (raw.size() != chunks.size()) {
    throw TransportError("embedding backend returned a different number of vectors", 0, 1, false);
  }
  if (dimension_ == 0) dimension_ = raw.front().size();
  std::vector<float> block;
  block.reserve(raw.size() * dimension_);
  for (const auto& v : raw) {
    if (v.size() != dimension_) {
      throw ValidationError(fmt::format("embedding dimension {} differs from index dimension {}",
                                        v.size(), dimension_));
    }
    block.insert(block.end(), v.begin(), v.end());
  }
  if (!kernels::normalize_rows(block, dimension_)) {
    throw ValidationError("embedding backend returned a zero vector");
  }
  vectors_.insert(vectors_.end(), block.begin(), block.end());
  for (auto& c : chunks) {
    if (c.token_estimate == 0) c.token_estimate = estimate_tokens(c.text);
    ids_.push_back(c.id);
    chunks_.push_back(std::move(c));
  }
}

std::span<const float> VectorIndex::vector(std::size_t row) const {
  return std::span<const float>(vectors_).subspan(row * dimension_, dimension_);
}

const KnowledgeChunk* VectorIndex::find(std::string_view chunk_id) const {
  for (const auto& c : chunks_) {
    if (c.id == chunk_id) return &c;
  }
  return nullptr;
}

SearchResult VectorIndex::search(std::string_view query, EmbeddingBackend& embedder,
                                 std::size_t k, ScanMode mode) const {
  if (empty()) return {{}, SearchStatus::kEmptyIndex};
  if (embedder.id() != embedder_id_) {
    throw ValidationError(fmt::format("index was built with embedder '{}', not '{}'",
                                      embedder_id_, embedder.id()));
  }
  const auto q = embed(embedder, query);
  return search_vector(q, k, mode);
}

SearchResult VectorIndex::search_vector(std::span<const float> unit_query, std::size_t k,
                                        ScanMode mode) const {
  if (empty()) return {{}, SearchStatus::kEmptyIndex};
  if (unit_query.size() != dimension_) {
    throw ValidationError(fmt::format("query dimension {} differs from index dimension {}",
                                      unit_query.size(), dimension_));
  }
  std::vector<double> scores(size());
  if (mode == ScanMode::kSerial) {
    kernels::score_rows_serial(vectors_, dimension_, unit_query, scores);
  } else {
    kernels::score_rows_parallel(vectors_, dimension_, unit_query, scores);
  }
  SearchResult result;
  for (auto row : kernels::top_k(scores, ids_, k)) {
    result.hits.push_back({ids_[row], scores[row]});
  }
  return result;
}

void VectorIndex::save(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  nlohmann::json manifest;
  manifest["format"] = kFormat;
  manifest["embedder"] = embedder_id_;
  manifest["dimension"] = dimension_;
  manifest["count"] = chunks_.size();
  auto table = nlohmann::json::array();
  for (const auto& c : chunks_) {
    table.push_back({{"id", c.id},
                     {"source", c.source},
                     {"text", c.text},
                     {"token_estimate", c.token_estimate}});
  }
  manifest["chunks"] = table;

  std::string bytes(vectors_.size() * sizeof(float), '\0');
  for (std::size_t i = 0; i < vectors_.size(); ++i) {
    auto word = std::bit_cast<std::uint32_t>(vectors_[i]);
    if constexpr (std::endian::native == std::endian::big) word = __builtin_bswap32(word);
    std::memcpy(bytes.data() + i * sizeof(float), &word, sizeof(word));
  }
  write_file_atomic(dir / kVectorsName, bytes);
  write_file_atomic(dir / kManifestName, manifest.dump(2) + "\n");
}

VectorIndex VectorIndex::load(const std::filesystem::path& dir) {
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(read_file(dir / kManifestName));
  } catch (const nlohmann::json::parse_error& e) {
    throw CorruptionError(fmt::format("index manifest is not valid JSON: {}", e.what()));
  }
  try {
    if (manifest.at("format").get<std::string>() != kFormat) {
      throw CorruptionError("unsupported index format " + manifest.at("format").dump());
    }
    VectorIndex index(manifest.at("embedder").get<std::string>(),
                      manifest.at("dimension").get<std::size_t>());
    const auto count = manifest.at("count").get<std::size_t>();
    const auto& table = manifest.at("chunks");
    if (table.size() != count) {
      throw CorruptionError(fmt::format("manifest lists {} chunks but count is {}", table.size(),
                                        count));
    }
    const auto bytes = read_file(dir / kVectorsName);
    if (bytes.size() != count * index.dimension_ * sizeof(float)) {
      throw CorruptionError(fmt::format(
          "vector file holds {} bytes, expected {} for {} vectors of dimension {}", bytes.size(),
          count * index.dimension_ * sizeof(float), count, index.dimension_));
    }
    index.vectors_.resize(count * index.dimension_);
    for (std::size_t i = 0; i < index.vectors_.size(); ++i) {
      std::uint32_t word = 0;
      std::memcpy(&word, bytes.data() + i * sizeof(float), sizeof(word));
      if constexpr (std::endian::native == std::endian::big) word = __builtin_bswap32(word);
      index.vectors_[i] = std::bit_cast<float>(word);
    }
    std::set<std::string> seen;
    for (std::size_t row = 0; row < count; ++row) {
      const auto& item = table[row];
      KnowledgeChunk c{item.at("id").get<std::string>(), item.at("source").get<std::string>(),
                       item.at("text").get<std::string>(),
                       item.at("token_estimate").get<std::size_t>()};
      if (!seen.insert(c.id).second) throw CorruptionError("duplicate chunk id " + c.id);
      double sq = 0.0;
      for (float x : index.vector(row)) sq += static_cast<double>(x) * x;
      if (std::abs(std::sqrt(sq) - 1.0) > 1e-5) {
        throw CorruptionError(fmt::format("vector for chunk '{}' is not unit length", c.id));
      }
      index.ids_.push_back(c.id);
      index.chunks_.push_back(std::move(c));
    }
    return index;
  } catch (const nlohmann::json::exception& e) {
    throw CorruptionError(fmt::format("index manifest is malformed: {}", e.what()));
  }
}

AssembledContext assemble_context(const VectorIndex& index, std::span<const SearchHit> hits,
                                  std::size_t token_budget) {
  if (token_budget == 0) throw ValidationError("token budget must be > 0");
  AssembledContext ctx;
  for (const auto& hit : hits) {
    const auto* chunk = index.find(hit.chunk_id);
    if (chunk == nullptr) throw NotFoundError("hit refers to unknown chunk " + hit.chunk_id);
    if (ctx.tokens + chunk->token_estimate > token_budget) {
      if (ctx.chunk_ids.empty()) {
        // Keep as many whole code points as fit in the budget.
        const auto offsets = code_point_offsets(chunk->text);
        const std::size_t keep = std::min(token_budget * 4, offsets.size() - 1);
        ctx.text = chunk->text.substr(0, offsets[keep]);
        ctx.text += "\n";
        ctx.text += kTruncationMarker;
        ctx.tokens = estimate_tokens(chunk->text.substr(0, offsets[keep]));
        ctx.chunk_ids.push_back(chunk->id);
        ctx.truncated = true;
      }
      break;
    }
    if (!ctx.text.empty()) ctx.text += "\n\n";
    ctx.text += chunk->text;
    ctx.tokens += chunk->token_estimate;
    ctx.chunk_ids.push_back(chunk->id);
  }
  return ctx;
}

const std::string_view kAnswerSystemPrompt =
    "You answer geotechnical questions using only the supplied context. "
    "If the context does not contain the answer, say that it does not.";

std::string render_answer_prompt(std::string_view context, std::string_view query) {
  return fmt::format("Context:\n{}\n\nQuestion: {}\nAnswer:", context, query);
}

GroundedAnswer answer(const VectorIndex& index, EmbeddingBackend& embedder,
                      CompletionBackend& completion, std::string_view query, std::size_t k,
                      std::size_t token_budget) {
  GroundedAnswer result;
  if (index.empty()) {
    result.status = AnswerStatus::kNoContext;
    result.text = "no context: the index is empty, refusing to answer without grounding";
    return result;
  }
  const auto found = index.search(query, embedder, k);
  const std::size_t usable = std::max<std::size_t>(1, token_budget - token_budget / 10);
  const auto ctx = assemble_context(index, found.hits, usable);
  result.prompt = render_answer_prompt(ctx.text, query);
  CompletionRequest request;
  request.temperature = 0.0;
  request.messages = {{"system", std::string(kAnswerSystemPrompt)}, {"user", result.prompt}};
  result.text = completion.complete(request);
  result.chunk_ids = ctx.chunk_ids;
  result.status = AnswerStatus::kAnswered;
  return result;
}

}  // namespace geollm
