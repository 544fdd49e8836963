#include "doctest.h"

#include <set>
#include <thread>

#include "geollm/error.hpp"
#include "geollm/memory_store.hpp"
#include "support.hpp"

using namespace geollm;

TEST_CASE("put, get and misses") {
  MemoryStore m;
  m.put("Sc", 1.11, "", "seed");
  CHECK(m.get("Sc")->value == 1.11);
  CHECK_FALSE(m.get("absent"));
  m.put("Sc", 1.2, "", "tool:ShapeFactor");
  CHECK(m.get("Sc")->value == 1.2);
  CHECK(m.get("Sc")->provenance == "tool:ShapeFactor");
  CHECK(m.get("Sc")->sequence == 2);
  CHECK_THROWS_AS(m.put("", 1, "", "x"), ValidationError);
}

TEST_CASE("persistence survives a reload") {
  testing::TempDir dir("memory");
  const auto path = dir / "store.json";
  CHECK(MemoryStore::load(path).size() == 0);
  MemoryStore m;
  m.put("Su", 35, "kPa", "tool:SoilReport");
  m.put("q_f", 199.689, "kPa", "tool:BearingCapacity");
  m.save(path);
  const auto back = MemoryStore::load(path);
  CHECK(back.entries() == m.entries());
  auto again = back;
  again.put("x", 1, "", "t");
  CHECK(again.get("x")->sequence == 3);

  const auto seed = MemoryStore::load(testing::fixtures() / "memory" / "pisa_memory.json");
  CHECK(seed.get("Sc")->value == 1.11);
}

TEST_CASE("concurrent writers are serialized") {
  MemoryStore m;
  std::vector<std::thread> threads;
  for (int t = 0; t < 4; ++t) {
    threads.emplace_back([&m, t] {
      for (int i = 0; i < 250; ++i) m.put("k" + std::to_string(t) + "_" + std::to_string(i), i, "", "t");
    });
  }
  for (auto& th : threads) th.join();
  CHECK(m.size() == 1000);
  std::set<std::uint64_t> seq;
  for (const auto& [k, r] : m.entries()) seq.insert(r.sequence);
  CHECK(seq.size() == 1000);
}
