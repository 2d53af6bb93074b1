#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "flexgc/ir_json.hpp"
#include "flexgc/report.hpp"
#include "test_util.hpp"

using namespace flexgc;
using namespace flexgc::testutil;

namespace {

std::string fixture(const std::string& name) {
  return std::string(FLEXGC_FIXTURE_DIR) + "/" + name;
}

const SupplyBucket& bucket(const std::vector<SupplyBucket>& hist,
                           const std::string& label) {
  for (const auto& b : hist) {
    if (b.label == label) return b;
  }
  FAIL("no bucket " << label);
  static SupplyBucket none;
  return none;
}

}  // namespace

TEST_CASE("supply buckets follow the decile rule") {
  std::vector<ArrayRecord> records = {{4, 4}, {0, 8}, {9, 10}};
  auto hist = supply_histogram(records);

  CHECK(bucket(hist, "full").count == 1);
  CHECK(bucket(hist, "empty").count == 1);
  CHECK(bucket(hist, "(0,10]").count == 1);  // ratio exactly 10%

  int64_t total = 0;
  for (const auto& b : hist) total += b.count;
  CHECK(total == 3);

  // capacity-zero arrays have no supply: they count as full
  auto hist2 = supply_histogram({{0, 0}});
  CHECK(bucket(hist2, "full").count == 1);

  // boundary checks around the decile edges
  auto hist3 = supply_histogram({{89, 100}, {90, 100}, {91, 100}});
  CHECK(bucket(hist3, "(10,20]").count == 1);  // supply 11%
  CHECK(bucket(hist3, "(0,10]").count == 2);   // supply 10% and 9%

  auto hist4 = supply_histogram({{1, 100}});  // 99% supply
  CHECK(bucket(hist4, "(90,100)").count == 1);
}

TEST_CASE("all-full inputs land in a single bucket") {
  std::vector<ArrayRecord> records = {{3, 3}, {8, 8}, {1, 1}};
  auto hist = supply_histogram(records);
  CHECK(bucket(hist, "full").count == 3);
  CHECK(bucket(hist, "full").min_capacity == 1);
  CHECK(bucket(hist, "full").max_capacity == 8);
  CHECK(bucket(hist, "full").avg_capacity == doctest::Approx(4.0));
  for (const auto& b : hist) {
    if (b.label != "full") CHECK(b.count == 0);
  }
}

TEST_CASE("bucket supply cells sum to the cycle's skipped cells") {
  AdtWorkload workload(5, SupplyFill::Stale, 250);
  GcStats stats =
      workload.heap().collect(workload.roots(), workload.exact_plans());
  auto hist = supply_histogram(stats.array_records);
  int64_t supply = 0;
  for (const auto& b : hist) supply += b.supply_cells;
  CHECK(supply == stats.cells_skipped);
}

TEST_CASE("supply histogram csv is deterministic") {
  std::string csv = supply_histogram_csv({{4, 4}, {0, 8}, {9, 10}});
  CHECK(csv ==
        "bucket,count,min_capacity,max_capacity,avg_capacity,supply_cells\n"
        "full,1,4,4,4.00,0\n"
        "(0,10],1,10,10,10.00,1\n"
        "(10,20],0,0,0,0.00,0\n"
        "(20,30],0,0,0,0.00,0\n"
        "(30,40],0,0,0,0.00,0\n"
        "(40,50],0,0,0,0.00,0\n"
        "(50,60],0,0,0,0.00,0\n"
        "(60,70],0,0,0,0.00,0\n"
        "(70,80],0,0,0,0.00,0\n"
        "(80,90],0,0,0,0.00,0\n"
        "(90,100),0,0,0,0.00,0\n"
        "empty,1,8,8,8.00,8\n");
}

TEST_CASE("typeset histogram counts sites by set size") {
  Program p = parse_program_file(fixture("hashdemo.prog"));
  ProgramIndex index(p);
  FlowResult r = compute_type_sets(index);
  auto rows = typeset_histogram(r);

  // buckets {NULL} and entries {CELL} have size 1; table {NULL, ITEM} size 2
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].set_size == 1);
  CHECK(rows[0].array_count == 2);
  CHECK(rows[0].null_free_ratio == doctest::Approx(0.5));
  CHECK(rows[1].set_size == 2);
  CHECK(rows[1].array_count == 1);
  CHECK(rows[1].null_free_ratio == doctest::Approx(0.0));

  CHECK(typeset_histogram_csv(r) ==
        "set_size,array_count,null_free_ratio\n"
        "1,2,0.5000\n"
        "2,1,0.0000\n");
}

TEST_CASE("empty program produces an empty histogram") {
  Program p;
  ClassDecl main;
  main.name = "MAIN";
  Method m;
  m.name = "main";
  main.methods.push_back(std::move(m));
  p.classes.push_back(std::move(main));
  p.entry_class = "MAIN";
  p.entry_method = "main";
  assign_stmt_uids(p);
  ProgramIndex index(p);
  FlowResult r = compute_type_sets(index);
  CHECK(typeset_histogram(r).empty());
  CHECK(typeset_histogram_csv(r) == "set_size,array_count,null_free_ratio\n");
}

TEST_CASE("saturation summary reports ratios and distinct sizes") {
  Program p = parse_program_file(fixture("trucks.prog"));
  ProgramIndex index(p);
  FlowResult before = compute_type_sets(index);
  FlowResult after = saturate_null(index);
  SaturationSummary s = saturation_summary(before, after);

  REQUIRE(s.rows.size() == 3);
  CHECK(s.rows[0].kind == "locals");
  CHECK(s.rows[1].kind == "globals");
  CHECK(s.rows[2].kind == "fields");
  for (const auto& row : s.rows) {
    CHECK(row.null_holders_after >= row.null_holders_before);
    CHECK(row.locations_after == row.locations_before);
  }
  // the local reading the truck array becomes a null holder
  CHECK(s.rows[0].null_holders_after > s.rows[0].null_holders_before);

  std::string csv = saturation_summary_csv(s);
  CHECK(csv.find("locals,") != std::string::npos);
  CHECK(csv.find("distinct_local_set_sizes_before") != std::string::npos);
}

TEST_CASE("gc cycles csv has the fixed header") {
  GcStats one;
  one.cycle = 1;
  one.arrays_marked = 2;
  CHECK(gc_cycles_csv({one}) ==
        "cycle,arrays_marked,cells_scanned,cells_skipped,capacity_total,"
        "objects_swept\n"
        "1,2,0,0,0,0\n");
}
