// Report tables: the distribution of arrays by relative supply-area size
// with per-bucket capacity statistics, the distribution of array content
// sets by size with their null-free ratios, and before/after summaries for
// the saturation experiments. All outputs are plain CSV, byte-deterministic
// for fixed inputs.
#pragma once

#include <string>
#include <vector>

#include "flexgc/heap.hpp"
#include "flexgc/typeflow.hpp"

namespace flexgc {

struct SupplyBucket {
  std::string label;  // "full", "(0,10]", ..., "(90,100)", "empty"
  int64_t count = 0;
  int64_t min_capacity = 0;
  int64_t max_capacity = 0;
  double avg_capacity = 0.0;
  int64_t supply_cells = 0;
};

// Buckets by supply ratio r = (capacity - size) / capacity: "full" for
// r == 0 (capacity 0 counts as full), "empty" for size == 0 with capacity
// > 0, and half-open deciles (k*10%, (k+1)*10%] in between.
std::vector<SupplyBucket> supply_histogram(const std::vector<ArrayRecord>& records);
std::string supply_histogram_csv(const std::vector<ArrayRecord>& records);

struct TypeSetRow {
  int64_t set_size = 0;     // members in the content set, null included
  int64_t array_count = 0;  // sites with that size
  double null_free_ratio = 0.0;
};

std::vector<TypeSetRow> typeset_histogram(const FlowResult& r);
std::string typeset_histogram_csv(const FlowResult& r);

struct SaturationSummary {
  struct KindRow {
    std::string kind;  // locals / globals / fields
    int64_t locations_before = 0;
    int64_t null_holders_before = 0;
    int64_t locations_after = 0;
    int64_t null_holders_after = 0;
  };
  std::vector<KindRow> rows;
  int64_t distinct_local_sizes_before = 0;
  int64_t distinct_local_sizes_after = 0;
};

SaturationSummary saturation_summary(const FlowResult& before,
                                     const FlowResult& after);
std::string saturation_summary_csv(const SaturationSummary& s);

std::string gc_cycles_csv(const std::vector<GcStats>& cycles);

}  // namespace flexgc
