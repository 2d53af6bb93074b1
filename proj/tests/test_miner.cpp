#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <sstream>

#include "flexgc/miner.hpp"

using namespace flexgc;

namespace {

std::string fixture(const std::string& name) {
  return std::string(FLEXGC_FIXTURE_DIR) + "/traces/" + name;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

MinerReport mine_file(const std::string& path, int64_t word_size = 8) {
  std::ifstream in(path);
  REQUIRE(in);
  return mine_trace(in, word_size);
}

struct Rng {
  uint64_t s;
  explicit Rng(uint64_t seed) : s(seed + 0x9e3779b97f4a7c15ULL) {}
  uint64_t next() {
    uint64_t z = (s += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  int below(int n) { return n <= 1 ? 0 : static_cast<int>(next() % n); }
};

}  // namespace

TEST_CASE("golden traces reproduce their reports byte for byte") {
  for (const char* name : {"gradual", "skipwrite", "wrongwidth", "callocfill",
                           "reallocgrow"}) {
    CAPTURE(name);
    MinerReport report = mine_file(fixture(std::string(name) + ".trace"));
    CHECK(report.to_csv() == slurp(fixture(std::string(name) + ".expected.csv")));
  }
}

TEST_CASE("gradual filling keeps the watermark moving") {
  Miner miner;
  miner.ingest(TraceEvent::alloc(1, 32, false));
  miner.ingest(TraceEvent::write(1, 0, 8, TraceEvent::ValueKind::HeapRef));
  miner.ingest(TraceEvent::write(1, 8, 8, TraceEvent::ValueKind::HeapRef));
  MinerReport r = miner.finalize();
  CHECK(r.used_bytes_gradual == 16);
  CHECK(r.supply_bytes_gradual == 16);
  CHECK(r.gradual_malloc == 1);

  // rewriting inside the used area changes nothing
  miner.ingest(TraceEvent::write(1, 0, 8, TraceEvent::ValueKind::Null));
  r = miner.finalize();
  CHECK(r.used_bytes_gradual == 16);
}

TEST_CASE("a write past the watermark demotes the block for good") {
  Miner miner;
  miner.ingest(TraceEvent::alloc(2, 32, false));
  miner.ingest(TraceEvent::write(2, 24, 8, TraceEvent::ValueKind::HeapRef));
  MinerReport r = miner.finalize();
  CHECK(r.bytes_not_gradual == 32);
  CHECK(r.not_gradual == 1);
  CHECK(r.used_bytes_gradual == 0);

  // later well-behaved writes cannot bring it back
  miner.ingest(TraceEvent::write(2, 0, 8, TraceEvent::ValueKind::HeapRef));
  r = miner.finalize();
  CHECK(r.not_gradual == 1);
}

TEST_CASE("non-pointer-shaped accesses exclude the block") {
  SUBCASE("narrow write") {
    Miner miner;
    miner.ingest(TraceEvent::alloc(3, 32, false));
    miner.ingest(TraceEvent::write(3, 0, 4, TraceEvent::ValueKind::HeapRef));
    MinerReport r = miner.finalize();
    CHECK(r.used_bytes_gradual + r.supply_bytes_gradual + r.bytes_not_gradual ==
          0);
  }
  SUBCASE("misaligned write") {
    Miner miner;
    miner.ingest(TraceEvent::alloc(3, 32, false));
    miner.ingest(TraceEvent::write(3, 4, 8, TraceEvent::ValueKind::HeapRef));
    CHECK(miner.live_blocks().at(3).category ==
          BlockState::Category::Excluded);
  }
  SUBCASE("non-reference value") {
    Miner miner;
    miner.ingest(TraceEvent::alloc(3, 32, false));
    miner.ingest(TraceEvent::write(3, 0, 8, TraceEvent::ValueKind::Other));
    CHECK(miner.live_blocks().at(3).category ==
          BlockState::Category::Excluded);
  }
  SUBCASE("narrow read") {
    Miner miner;
    miner.ingest(TraceEvent::alloc(3, 32, false));
    miner.ingest(TraceEvent::read(3, 0, 4));
    CHECK(miner.live_blocks().at(3).category ==
          BlockState::Category::Excluded);
  }
  SUBCASE("word-sized reads are harmless wherever they land") {
    Miner miner;
    miner.ingest(TraceEvent::alloc(3, 32, false));
    miner.ingest(TraceEvent::read(3, 24, 8));
    CHECK(miner.live_blocks().at(3).category ==
          BlockState::Category::CandidateGradual);
    CHECK(miner.live_blocks().at(3).used_slots == 0);
  }
}

TEST_CASE("a smaller word size reclassifies narrow traffic") {
  Miner miner(4);
  miner.ingest(TraceEvent::alloc(3, 32, false));
  miner.ingest(TraceEvent::write(3, 0, 4, TraceEvent::ValueKind::HeapRef));
  MinerReport r = miner.finalize();
  CHECK(r.gradual_malloc == 1);
  CHECK(r.used_bytes_gradual == 4);
}

TEST_CASE("calloc blocks that fill gradually are useless callocs") {
  Miner miner;
  miner.ingest(TraceEvent::alloc(4, 32, true));
  miner.ingest(TraceEvent::write(4, 0, 8, TraceEvent::ValueKind::HeapRef));
  MinerReport r = miner.finalize();
  CHECK(r.gradual_calloc == 1);
  CHECK(r.useless_calloc_ids == std::set<int64_t>{4});

  // a calloc block never written still counts: zeroing bought nothing
  miner.ingest(TraceEvent::alloc(5, 64, true));
  r = miner.finalize();
  CHECK(r.useless_calloc_ids == std::set<int64_t>{4, 5});
  CHECK(r.supply_bytes_gradual == 24 + 64);
}

TEST_CASE("realloc keeps category and watermark") {
  Miner miner;
  miner.ingest(TraceEvent::alloc(5, 16, false));
  miner.ingest(TraceEvent::write(5, 0, 8, TraceEvent::ValueKind::HeapRef));
  miner.ingest(TraceEvent::write(5, 8, 8, TraceEvent::ValueKind::HeapRef));
  miner.ingest(TraceEvent::realloc(5, 32));
  CHECK(miner.live_blocks().at(5).used_slots == 2);
  miner.ingest(TraceEvent::write(5, 16, 8, TraceEvent::ValueKind::Null));
  MinerReport r = miner.finalize();
  CHECK(r.used_bytes_gradual == 24);
  CHECK(r.supply_bytes_gradual == 8);

  // shrinking truncates the watermark
  miner.ingest(TraceEvent::realloc(5, 8));
  CHECK(miner.live_blocks().at(5).used_slots == 1);
}

TEST_CASE("free removes the block from the snapshot") {
  Miner miner;
  miner.ingest(TraceEvent::alloc(6, 32, false));
  miner.ingest(TraceEvent::write(6, 0, 8, TraceEvent::ValueKind::HeapRef));
  miner.ingest(TraceEvent::free(6));
  MinerReport r = miner.finalize();
  CHECK(r.used_bytes_gradual + r.supply_bytes_gradual + r.bytes_not_gradual == 0);

  // the id may be reused after a free
  miner.ingest(TraceEvent::alloc(6, 8, false));
  CHECK(miner.live_blocks().count(6) == 1);
}

TEST_CASE("trace integrity errors carry line numbers") {
  Miner miner;
  CHECK_THROWS_AS(miner.ingest(TraceEvent::write(9, 0, 8,
                                                 TraceEvent::ValueKind::Null),
                               3),
                  TraceError);
  miner.ingest(TraceEvent::alloc(9, 16, false));
  CHECK_THROWS_AS(miner.ingest(TraceEvent::alloc(9, 16, false)), TraceError);
  CHECK_THROWS_AS(miner.ingest(TraceEvent::write(9, 8, 16,
                                                 TraceEvent::ValueKind::Null)),
                  TraceError);
  CHECK_THROWS_AS(miner.ingest(TraceEvent::read(9, -8, 8)), TraceError);
  miner.ingest(TraceEvent::free(9));
  try {
    miner.ingest(TraceEvent::free(9), 42);
    FAIL("double free must throw");
  } catch (const TraceError& e) {
    CHECK(e.line() == 42);
    CHECK(std::string(e.what()).find("line 42") != std::string::npos);
  }
}

TEST_CASE("trace text parsing") {
  auto ev = parse_trace_line("W 3 16 8 r", 1);
  REQUIRE(ev);
  CHECK(ev->kind == TraceEvent::Kind::Write);
  CHECK(ev->block_id == 3);
  CHECK(ev->offset == 16);
  CHECK(ev->value_kind == TraceEvent::ValueKind::HeapRef);

  CHECK(!parse_trace_line("", 1));
  CHECK(!parse_trace_line("# comment", 1));
  CHECK_THROWS_AS(parse_trace_line("Q 1 2", 7), TraceError);
  CHECK_THROWS_AS(parse_trace_line("A 1 xyz m", 7), TraceError);
  CHECK_THROWS_AS(parse_trace_line("A 1 2", 7), TraceError);
  CHECK_THROWS_AS(parse_trace_line("W 1 0 8 z", 7), TraceError);

  // round trip through the text format
  TraceEvent orig = TraceEvent::write(12, 40, 8, TraceEvent::ValueKind::Null);
  auto back = parse_trace_line(format_trace_event(orig), 1);
  REQUIRE(back);
  CHECK(back->block_id == orig.block_id);
  CHECK(back->offset == orig.offset);
  CHECK(back->value_kind == orig.value_kind);
}

TEST_CASE("fuzzed event streams: categories one-way, bytes conserved") {
  Rng rng(99);
  Miner miner;
  std::map<int64_t, BlockState::Category> last_seen;
  int64_t next_id = 0;
  std::vector<int64_t> live;

  auto category_rank = [](BlockState::Category c) {
    switch (c) {
      case BlockState::Category::CandidateGradual: return 0;
      case BlockState::Category::NotGradual: return 1;
      case BlockState::Category::Excluded: return 2;
    }
    return 0;
  };

  for (int i = 0; i < 200000; ++i) {
    int roll = rng.below(10);
    if (live.empty() || roll == 0) {
      int64_t id = next_id++;
      miner.ingest(TraceEvent::alloc(id, 8 * rng.below(16), rng.below(2) == 1));
      live.push_back(id);
      last_seen[id] = BlockState::Category::CandidateGradual;
      continue;
    }
    int64_t id = live[static_cast<size_t>(rng.below(static_cast<int>(live.size())))];
    const BlockState& before = miner.live_blocks().at(id);
    if (roll == 1) {
      miner.ingest(TraceEvent::free(id));
      live.erase(std::find(live.begin(), live.end(), id));
      last_seen.erase(id);
      continue;
    }
    if (roll == 2) {
      miner.ingest(TraceEvent::realloc(id, 8 * rng.below(16)));
    } else if (before.bytes > 0) {
      int64_t slots = before.bytes / 8;
      int64_t slot = rng.below(static_cast<int>(slots));
      int64_t width = rng.below(10) == 0 ? 4 : 8;
      auto vk = rng.below(10) == 0 ? TraceEvent::ValueKind::Other
                : rng.below(2) == 0 ? TraceEvent::ValueKind::HeapRef
                                    : TraceEvent::ValueKind::Null;
      if (rng.below(3) == 0) {
        miner.ingest(TraceEvent::read(id, slot * 8, width));
      } else {
        miner.ingest(TraceEvent::write(id, slot * 8, width, vk));
      }
    }

    // category transitions only move forward
    const BlockState& after = miner.live_blocks().at(id);
    REQUIRE(category_rank(after.category) >= category_rank(last_seen.at(id)));
    last_seen[id] = after.category;

    if (i % 4096 == 0) {
      // conservation over included live blocks
      MinerReport r = miner.finalize();
      int64_t included = 0;
      for (const auto& [bid, b] : miner.live_blocks()) {
        if (b.category != BlockState::Category::Excluded) included += b.bytes;
      }
      REQUIRE(r.used_bytes_gradual + r.supply_bytes_gradual +
                  r.bytes_not_gradual ==
              included);
      REQUIRE(r.used_bytes_gradual >= 0);
      REQUIRE(r.supply_bytes_gradual >= 0);
    }
  }
}
