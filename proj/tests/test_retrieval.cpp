#include "doctest.h"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <random>

#include <fmt/format.h>

#include "geollm/error.hpp"
#include "geollm/retrieval.hpp"
#include "geollm/text_util.hpp"
#include "support.hpp"

using namespace geollm;

namespace {

// Exhaustive ranking computed independently of the index's scan and top-k.
std::vector<SearchHit> brute_force(const VectorIndex& index, std::span<const float> q,
                                   std::size_t k) {
  std::vector<SearchHit> all;
  for (std::size_t row = 0; row < index.size(); ++row) {
    const auto v = index.vector(row);
    double dot = 0.0;
    for (std::size_t j = 0; j < v.size(); ++j) dot += static_cast<double>(v[j]) * q[j];
    all.push_back({index.chunks()[row].id, dot});
  }
  std::stable_sort(all.begin(), all.end(), [](const SearchHit& a, const SearchHit& b) {
    return a.score != b.score ? a.score > b.score : a.chunk_id < b.chunk_id;
  });
  all.resize(std::min(k, all.size()));
  return all;
}

std::vector<KnowledgeChunk> random_chunks(std::size_t n, std::uint64_t seed) {
  static const char* words[] = {"clay",  "sand",   "silt",  "gravel", "plastic", "limit",
                                "water", "content", "trial", "diggs",  "tag",     "schema",
                                "layer", "strength", "bearing", "load"};
  std::mt19937_64 rng(seed);
  std::vector<KnowledgeChunk> out;
  for (std::size_t i = 0; i < n; ++i) {
    std::string text;
    const auto len = 3 + rng() % 12;
    for (std::size_t w = 0; w < len; ++w) {
      text += words[rng() % 16];
      text += ' ';
    }
    out.push_back({fmt::format("doc#{:04}", i), "doc", text, estimate_tokens(text)});
  }
  return out;
}

}  // namespace

TEST_CASE("chunking windows and overlap") {
  const std::string text(1000, 'a');
  const auto chunks = chunk_document(text, "src", 100, 10);
  REQUIRE(chunks.size() == 3);  // [0,400) [360,760) [720,1000)
  CHECK(chunks[0].id == "src#0000");
  CHECK(chunks[1].text.size() == 400);
  CHECK(chunks[2].text.size() == 280);
  CHECK(chunks[0].token_estimate == 100);
  CHECK(chunk_document("", "src", 10, 1).empty());
  CHECK_THROWS_AS(chunk_document("x", "src", 10, 10), ValidationError);
  // Multi-byte characters are never split.
  const auto greek = chunk_document("φφφφφφφφφφ", "g", 1, 0);
  CHECK(greek.size() == 3);
  CHECK(greek[0].text == "φφφφ");
}

TEST_CASE("hash embedder is deterministic and exact matches score 1") {
  HashEmbedder e;
  CHECK(e.embed_one("plastic limit") == e.embed_one("plastic limit"));
  CHECK(e.embed_one("Plastic LIMIT") == e.embed_one("plastic limit"));
  const auto a = embed(e, "plastic limit");
  double dot = 0;
  for (float x : a) dot += static_cast<double>(x) * x;
  CHECK(dot == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(e.embed_batch({"a b", "c"}) ==
        std::vector<std::vector<float>>{e.embed_one("a b"), e.embed_one("c")});
  CHECK(e.id() == "hash-bow-256");
  CHECK(embed(e, "the").size() == 256);  // stop words alone still embed
  CHECK(embed(e, "...").size() == 256);
}

TEST_CASE("verbatim query ranks its chunk first") {
  HashEmbedder e;
  auto chunks = random_chunks(300, 1);
  const auto index = VectorIndex::build(chunks, e);
  for (std::size_t i : {0u, 17u, 299u}) {
    const auto r = index.search(chunks[i].text, e, 5);
    REQUIRE(!r.hits.empty());
    CHECK(r.hits[0].score == doctest::Approx(1.0).epsilon(1e-6));
    // A duplicate text may tie; the chunk must be among the exact matches.
    bool found = false;
    for (const auto& h : r.hits) found |= h.chunk_id == chunks[i].id && h.score > 1 - 1e-6;
    CHECK(found);
  }
}

TEST_CASE("search equals brute force ranking") {
  HashEmbedder e(64);
  const auto index = VectorIndex::build(random_chunks(1000, 2), e);
  std::mt19937_64 rng(5);
  for (int t = 0; t < 25; ++t) {
    const auto q = embed(e, random_chunks(1, rng())[0].text);
    const auto expected = brute_force(index, q, 10);
    CHECK(index.search_vector(q, 10, ScanMode::kSerial).hits == expected);
    CHECK(index.search_vector(q, 10, ScanMode::kParallel).hits == expected);
  }
}

TEST_CASE("empty index and dimension checks") {
  HashEmbedder e;
  const auto index = VectorIndex::build({}, e);
  CHECK(index.search("anything", e).status == SearchStatus::kEmptyIndex);
  const auto full = VectorIndex::build(random_chunks(3, 1), e);
  std::vector<float> bad(10, 0.1f);
  CHECK_THROWS_AS(full.search_vector(bad), ValidationError);
  HashEmbedder other(32);
  CHECK_THROWS(full.search("x", other));
  auto dup = random_chunks(2, 1);
  dup[1].id = dup[0].id;
  CHECK_THROWS(VectorIndex::build(dup, e));
}

TEST_CASE("index persistence round-trips bit-identically") {
  testing::TempDir dir("index");
  HashEmbedder e;
  const auto index = VectorIndex::build(random_chunks(200, 4), e);
  index.save(dir.path());
  const auto loaded = VectorIndex::load(dir.path());
  CHECK(loaded.chunks() == index.chunks());
  CHECK(std::equal(loaded.vectors().begin(), loaded.vectors().end(), index.vectors().begin(),
                   index.vectors().end()));
  const auto q = embed(e, "plastic limit water content");
  CHECK(loaded.search_vector(q, 20).hits == index.search_vector(q, 20).hits);

  // Truncated vector file is rejected.
  const auto vec = dir / "vectors.f32";
  auto bytes = read_file(vec);
  write_file_atomic(vec, bytes.substr(0, bytes.size() - 4));
  CHECK_THROWS_AS(VectorIndex::load(dir.path()), CorruptionError);
  write_file_atomic(dir / "manifest.json", "{\"format\":");
  CHECK_THROWS_AS(VectorIndex::load(dir.path()), CorruptionError);
}

TEST_CASE("context assembly respects the budget") {
  HashEmbedder e;
  std::vector<KnowledgeChunk> chunks{{"a#0000", "a", std::string(400, 'a'), 100},
                                     {"b#0000", "b", std::string(400, 'b'), 100},
                                     {"c#0000", "c", std::string(40, 'c'), 10}};
  const auto index = VectorIndex::build(chunks, e);
  const std::vector<SearchHit> hits{{"a#0000", 0.9}, {"b#0000", 0.8}, {"c#0000", 0.7}};
  const auto ctx = assemble_context(index, hits, 150);
  CHECK(ctx.chunk_ids == std::vector<std::string>{"a#0000"});
  CHECK(ctx.tokens == 100);
  CHECK_FALSE(ctx.truncated);
  const auto two = assemble_context(index, hits, 205);
  CHECK(two.chunk_ids.size() == 2);
  CHECK(two.text == chunks[0].text + "\n\n" + chunks[1].text);
  const auto cut = assemble_context(index, hits, 20);
  CHECK(cut.truncated);
  CHECK(cut.tokens <= 20);
  CHECK(cut.text.find(kTruncationMarker) != std::string::npos);
}

TEST_CASE("grounded answer and refusal") {
  HashEmbedder e;
  const auto docs = testing::fixtures() / "knowledge";
  std::vector<KnowledgeChunk> chunks;
  for (const auto& name : {"plastic_limit.txt", "liquid_limit.txt", "borehole.txt"}) {
    auto c = chunk_document(read_file(docs / name), name, 200, 20);
    chunks.insert(chunks.end(), c.begin(), c.end());
  }
  const auto index = VectorIndex::build(chunks, e);
  ScriptedBackend backend({"The tag is <diggs_geo:waterContent>."});
  const auto a = answer(index, e, backend, "What is the XML tag to store plastic limit in DIGGS?");
  CHECK(a.status == AnswerStatus::kAnswered);
  CHECK(a.text == "The tag is <diggs_geo:waterContent>.");
  CHECK(a.prompt.find("plasticLimitTrial") != std::string::npos);
  REQUIRE(backend.requests().size() == 1);
  CHECK(backend.requests()[0].temperature == 0.0);
  CHECK(backend.requests()[0].messages[1].content == a.prompt);

  ScriptedBackend unused({"should not be used"});
  const auto empty = VectorIndex::build({}, e);
  const auto refusal = answer(empty, e, unused, "anything");
  CHECK(refusal.status == AnswerStatus::kNoContext);
  CHECK(unused.calls() == 0);
}
