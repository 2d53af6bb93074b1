#include "flexgc/report.hpp"

#include <cstdio>
#include <map>
#include <set>
#include <sstream>

namespace flexgc {

namespace {

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

constexpr int kFull = 0;
constexpr int kEmpty = 11;  // deciles occupy 1..10

std::string bucket_label(int b) {
  if (b == kFull) return "full";
  if (b == kEmpty) return "empty";
  if (b == 10) return "(90,100)";
  return "(" + std::to_string((b - 1) * 10) + "," + std::to_string(b * 10) + "]";
}

int bucket_of(const ArrayRecord& r) {
  if (r.capacity == 0 || r.size == r.capacity) return kFull;
  if (r.size == 0) return kEmpty;
  int64_t supply = r.capacity - r.size;
  // smallest k with supply/capacity <= k/10, i.e. ceil(10*supply/capacity)
  int64_t k = (10 * supply + r.capacity - 1) / r.capacity;
  return static_cast<int>(k);
}

}  // namespace

std::vector<SupplyBucket> supply_histogram(const std::vector<ArrayRecord>& records) {
  struct Acc {
    int64_t count = 0;
    int64_t min_capacity = 0;
    int64_t max_capacity = 0;
    int64_t capacity_sum = 0;
    int64_t supply_cells = 0;
  };
  std::vector<Acc> acc(12);
  for (const ArrayRecord& r : records) {
    Acc& a = acc[static_cast<size_t>(bucket_of(r))];
    if (a.count == 0 || r.capacity < a.min_capacity) a.min_capacity = r.capacity;
    if (r.capacity > a.max_capacity) a.max_capacity = r.capacity;
    a.count += 1;
    a.capacity_sum += r.capacity;
    a.supply_cells += r.capacity - r.size;
  }

  std::vector<SupplyBucket> out;
  for (int b = 0; b < 12; ++b) {
    const Acc& a = acc[static_cast<size_t>(b)];
    SupplyBucket bucket;
    bucket.label = bucket_label(b);
    bucket.count = a.count;
    bucket.min_capacity = a.min_capacity;
    bucket.max_capacity = a.max_capacity;
    bucket.avg_capacity =
        a.count == 0 ? 0.0
                     : static_cast<double>(a.capacity_sum) /
                           static_cast<double>(a.count);
    bucket.supply_cells = a.supply_cells;
    out.push_back(std::move(bucket));
  }
  return out;
}

std::string supply_histogram_csv(const std::vector<ArrayRecord>& records) {
  std::ostringstream out;
  out << "bucket,count,min_capacity,max_capacity,avg_capacity,supply_cells\n";
  for (const SupplyBucket& b : supply_histogram(records)) {
    out << b.label << ',' << b.count << ',' << b.min_capacity << ','
        << b.max_capacity << ',' << fixed(b.avg_capacity, 2) << ','
        << b.supply_cells << '\n';
  }
  return out.str();
}

std::vector<TypeSetRow> typeset_histogram(const FlowResult& r) {
  std::map<int64_t, std::pair<int64_t, int64_t>> by_size;  // size -> {count, null_free}
  for (const auto& [loc, set] : r.sets) {
    if (loc.kind != Location::Kind::ArrayContent) continue;
    auto& entry = by_size[static_cast<int64_t>(set.size())];
    entry.first += 1;
    if (!set.contains_null()) entry.second += 1;
  }
  std::vector<TypeSetRow> out;
  for (const auto& [size, entry] : by_size) {
    TypeSetRow row;
    row.set_size = size;
    row.array_count = entry.first;
    row.null_free_ratio =
        static_cast<double>(entry.second) / static_cast<double>(entry.first);
    out.push_back(row);
  }
  return out;
}

std::string typeset_histogram_csv(const FlowResult& r) {
  std::ostringstream out;
  out << "set_size,array_count,null_free_ratio\n";
  for (const TypeSetRow& row : typeset_histogram(r)) {
    out << row.set_size << ',' << row.array_count << ','
        << fixed(row.null_free_ratio, 4) << '\n';
  }
  return out.str();
}

SaturationSummary saturation_summary(const FlowResult& before,
                                     const FlowResult& after) {
  SaturationSummary s;
  auto kind_row = [&](const char* name, Location::Kind kind) {
    SaturationSummary::KindRow row;
    row.kind = name;
    for (const auto& [loc, set] : before.sets) {
      if (loc.kind != kind) continue;
      row.locations_before += 1;
      if (set.contains_null()) row.null_holders_before += 1;
    }
    for (const auto& [loc, set] : after.sets) {
      if (loc.kind != kind) continue;
      row.locations_after += 1;
      if (set.contains_null()) row.null_holders_after += 1;
    }
    s.rows.push_back(std::move(row));
  };
  kind_row("locals", Location::Kind::Local);
  kind_row("globals", Location::Kind::Global);
  kind_row("fields", Location::Kind::Field);

  auto distinct_local_sizes = [](const FlowResult& r) {
    std::set<size_t> sizes;
    for (const auto& [loc, set] : r.sets) {
      if (loc.kind == Location::Kind::Local) sizes.insert(set.size());
    }
    return static_cast<int64_t>(sizes.size());
  };
  s.distinct_local_sizes_before = distinct_local_sizes(before);
  s.distinct_local_sizes_after = distinct_local_sizes(after);
  return s;
}

std::string saturation_summary_csv(const SaturationSummary& s) {
  std::ostringstream out;
  out << "kind,locations_before,null_holders_before,locations_after,"
         "null_holders_after,ratio_before,ratio_after\n";
  for (const auto& row : s.rows) {
    double rb = row.locations_before == 0
                    ? 0.0
                    : static_cast<double>(row.null_holders_before) /
                          static_cast<double>(row.locations_before);
    double ra = row.locations_after == 0
                    ? 0.0
                    : static_cast<double>(row.null_holders_after) /
                          static_cast<double>(row.locations_after);
    out << row.kind << ',' << row.locations_before << ','
        << row.null_holders_before << ',' << row.locations_after << ','
        << row.null_holders_after << ',' << fixed(rb, 4) << ',' << fixed(ra, 4)
        << '\n';
  }
  out << "distinct_local_set_sizes_before,distinct_local_set_sizes_after\n"
      << s.distinct_local_sizes_before << ',' << s.distinct_local_sizes_after
      << '\n';
  return out.str();
}

std::string gc_cycles_csv(const std::vector<GcStats>& cycles) {
  std::ostringstream out;
  out << gc_stats_csv_header() << '\n';
  for (const GcStats& stats : cycles) out << gc_stats_csv_row(stats) << '\n';
  return out.str();
}

}  // namespace flexgc
