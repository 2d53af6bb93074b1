// Streaming classifier of allocation traces. Every new block starts in the
// gradual-filling category and keeps a used-slot watermark; a write exactly
// at the watermark extends it, a write past it demotes the block for good,
// and any access that does not look like a pointer-array access excludes
// the block from the analysis entirely.
#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "flexgc/trace.hpp"

namespace flexgc {

struct BlockState {
  enum class Category : uint8_t { CandidateGradual, NotGradual, Excluded };

  int64_t bytes = 0;
  bool zeroed = false;
  int64_t used_slots = 0;  // watermark, in words
  Category category = Category::CandidateGradual;
};

struct MinerReport {
  int64_t used_bytes_gradual = 0;
  int64_t supply_bytes_gradual = 0;
  int64_t bytes_not_gradual = 0;
  int64_t gradual_malloc = 0;
  int64_t gradual_calloc = 0;
  int64_t not_gradual = 0;
  // Gradually filled blocks that were allocated zero-initialized: the
  // zeroing bought nothing.
  std::set<int64_t> useless_calloc_ids;

  std::string to_csv() const;  // header + one row
};

extern const char* const kMinerCsvHeader;

class Miner {
 public:
  explicit Miner(int64_t word_size = 8);

  // Feeds one event, in program order. Throws TraceError (tagged with the
  // line number) on unknown ids, double frees and out-of-bounds accesses.
  void ingest(const TraceEvent& ev, int64_t line = 0);

  // Snapshot over the live, non-excluded blocks.
  MinerReport finalize() const;

  const std::map<int64_t, BlockState>& live_blocks() const { return blocks_; }
  int64_t word_size() const { return word_size_; }

 private:
  BlockState& block(int64_t id, int64_t line);

  int64_t word_size_;
  std::map<int64_t, BlockState> blocks_;
};

// Whole-trace convenience: parse, ingest, finalize.
MinerReport mine_trace(std::istream& in, int64_t word_size = 8);

}  // namespace flexgc
