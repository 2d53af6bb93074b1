#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "flexgc/ir_json.hpp"
#include "flexgc/randprog.hpp"
#include "flexgc/typeflow.hpp"

using namespace flexgc;

namespace {

std::string fixture(const std::string& name) {
  return std::string(FLEXGC_FIXTURE_DIR) + "/" + name;
}

std::vector<std::string> set_names(const ProgramIndex& p, const TypeSet& ts) {
  std::vector<std::string> out;
  for (Member m : ts.members()) out.push_back(member_to_string(p, m));
  std::sort(out.begin(), out.end());
  return out;
}

// Statement order inside bodies must not matter; shuffle keeps uids with
// their statements.
Program shuffled(const Program& original, uint64_t seed) {
  Program p = original;
  uint64_t s = seed;
  auto next = [&s]() {
    uint64_t z = (s += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  for (auto& cls : p.classes) {
    for (auto& m : cls.methods) {
      for (size_t i = m.body.size(); i > 1; --i) {
        std::swap(m.body[i - 1], m.body[next() % i]);
      }
    }
  }
  return p;
}

}  // namespace

TEST_CASE("fig2: instance field accumulates null, truck and car") {
  Program p = parse_program_file(fixture("fig2.prog"));
  ProgramIndex index(p);
  FlowResult r = compute_type_sets(index);

  ClassId owner = *index.class_id("OWNER");
  const TypeSet& vehicle = r.at(Location::field(owner, "vehicle"));
  CHECK(set_names(index, vehicle) ==
        std::vector<std::string>{"CAR", "NULL", "TRUCK"});

  // the local reading the field sees the same set
  MethodId entry = index.entry();
  CHECK(set_names(index, r.at(Location::local(entry, "v"))) ==
        std::vector<std::string>{"CAR", "NULL", "TRUCK"});

  // receiver can be null: the call site is flagged
  CHECK(r.null_dereference_sites.size() == 1);

  // dispatch on {truck, car}: the inherited wash and the override
  ClassId vehicle_cls = *index.class_id("VEHICLE");
  ClassId car = *index.class_id("CAR");
  std::set<MethodId> expect = {*index.resolve_method(vehicle_cls, "wash"),
                               *index.resolve_method(car, "wash")};
  std::set<MethodId> reachable_wash;
  for (MethodId m : r.reachable_methods) {
    if (index.method(m).name == "wash") reachable_wash.insert(m);
  }
  CHECK(reachable_wash == expect);
}

TEST_CASE("dispatch_targets") {
  Program p = parse_program_file(fixture("fig2.prog"));
  ProgramIndex index(p);
  ClassId truck = *index.class_id("TRUCK");
  ClassId car = *index.class_id("CAR");
  ClassId vehicle = *index.class_id("VEHICLE");

  TypeSet null_only;
  null_only.insert(kNullMember);
  DispatchResult none = dispatch_targets(index, null_only, "wash");
  CHECK(none.targets.empty());
  CHECK(none.null_receiver);

  TypeSet just_car;
  just_car.insert(class_member(car));
  DispatchResult direct = dispatch_targets(index, just_car, "wash");
  CHECK(direct.targets == std::set<MethodId>{*index.resolve_method(car, "wash")});
  CHECK(!direct.null_receiver);

  TypeSet just_truck;
  just_truck.insert(class_member(truck));
  DispatchResult inherited = dispatch_targets(index, just_truck, "wash");
  CHECK(inherited.targets ==
        std::set<MethodId>{*index.resolve_method(vehicle, "wash")});

  TypeSet owner_set;
  owner_set.insert(class_member(*index.class_id("OWNER")));
  CHECK_THROWS_AS(dispatch_targets(index, owner_set, "wash"), ValidateError);
  CHECK(dispatch_targets(index, owner_set, "wash", /*strict=*/false)
            .targets.empty());
}

TEST_CASE("array smashing unions every reachable write") {
  // one site, an extend of TRUCK and a write of CAR through an alias
  const char* doc = R"({
    "version": 1,
    "classes": [
      {"name": "TRUCK", "parent": null, "fields": [], "methods": []},
      {"name": "CAR", "parent": null, "fields": [], "methods": []},
      {"name": "MAIN", "parent": null, "fields": [], "methods": [
        {"name": "main", "params": [], "locals": ["a", "b"], "body": [
          {"op": "array_create", "into": {"place": "local", "name": "a"},
           "kind": "fast", "site": 0, "args": [4]},
          {"op": "assign_local", "name": "b", "value": {"expr": "local", "name": "a"}},
          {"op": "array_extend", "target": {"place": "local", "name": "a"},
           "value": {"expr": "new", "class": "TRUCK", "site": 1}},
          {"op": "array_write", "target": {"place": "local", "name": "b"},
           "index": 0, "value": {"expr": "new", "class": "CAR", "site": 2}}
        ]}
      ]}
    ],
    "globals": [],
    "entry": "MAIN.main"
  })";
  Program p = parse_program(doc);
  ProgramIndex index(p);
  FlowResult r = compute_type_sets(index);
  CHECK(set_names(index, r.at(Location::array_content(0))) ==
        std::vector<std::string>{"CAR", "TRUCK"});
  // truck-only content has no null member
  CHECK(!r.at(Location::array_content(0)).contains_null());
}

TEST_CASE("calloc and zeroed sites seed null; fast sites start empty") {
  Program p = parse_program_file(fixture("hashdemo.prog"));
  ProgramIndex index(p);
  FlowResult r = compute_type_sets(index);

  CHECK(set_names(index, r.at(Location::array_content(0))) ==
        std::vector<std::string>{"NULL"});  // buckets: calloc, never written
  CHECK(set_names(index, r.at(Location::array_content(1))) ==
        std::vector<std::string>{"CELL"});  // entries: one extend
  CHECK(set_names(index, r.at(Location::array_content(2))) ==
        std::vector<std::string>{"ITEM", "NULL"});  // table: zeroed + writes
}

TEST_CASE("reachability: entry only when nothing is called") {
  const char* doc = R"({
    "version": 1,
    "classes": [
      {"name": "A", "parent": null, "fields": [], "methods": [
        {"name": "idle", "params": [], "locals": [], "body": []}
      ]},
      {"name": "MAIN", "parent": null, "fields": [], "methods": [
        {"name": "main", "params": [], "locals": [], "body": []}
      ]}
    ],
    "globals": [],
    "entry": "MAIN.main"
  })";
  Program p = parse_program(doc);
  ProgramIndex index(p);
  std::set<MethodId> reach = compute_reachable(index);
  CHECK(reach == std::set<MethodId>{index.entry()});
}

TEST_CASE("params join argument sets; returns flow to result locals") {
  const char* doc = R"({
    "version": 1,
    "classes": [
      {"name": "TRUCK", "parent": null, "fields": [], "methods": []},
      {"name": "WORKER", "parent": null, "fields": [], "methods": [
        {"name": "pick", "params": ["x"], "locals": [],
         "body": [], "return": {"expr": "param", "index": 0}}
      ]},
      {"name": "MAIN", "parent": null, "fields": [], "methods": [
        {"name": "main", "params": [], "locals": ["w", "out"], "body": [
          {"op": "assign_local", "name": "w",
           "value": {"expr": "new", "class": "WORKER", "site": 10}},
          {"op": "call", "receiver": {"expr": "local", "name": "w"},
           "method": "pick",
           "args": [{"expr": "new", "class": "TRUCK", "site": 11}],
           "result": "out"}
        ]}
      ]}
    ],
    "globals": [],
    "entry": "MAIN.main"
  })";
  Program p = parse_program(doc);
  ProgramIndex index(p);
  FlowResult r = compute_type_sets(index);
  ClassId worker = *index.class_id("WORKER");
  MethodId pick = *index.resolve_method(worker, "pick");
  CHECK(set_names(index, r.at(Location::param(pick, 0))) ==
        std::vector<std::string>{"TRUCK"});
  CHECK(set_names(index, r.at(Location::ret(pick))) ==
        std::vector<std::string>{"TRUCK"});
  CHECK(set_names(index, r.at(Location::local(index.entry(), "out"))) ==
        std::vector<std::string>{"TRUCK"});
}

TEST_CASE("saturate_null infects array readers") {
  Program p = parse_program_file(fixture("trucks.prog"));
  ProgramIndex index(p);
  FlowResult base = compute_type_sets(index);
  FlowResult after = saturate_null(index);

  // pointwise supersets
  for (const auto& [loc, set] : base.sets) {
    CAPTURE(loc.describe(index));
    CHECK(set.subset_of(after.at(loc)));
  }

  // the local t reads the fleet array whose only null source is saturation
  MethodId entry = index.entry();
  CHECK(!base.at(Location::local(entry, "t")).contains_null());
  CHECK(after.at(Location::local(entry, "t")).contains_null());

  // a location with no array-derived flow keeps its set
  CHECK(base.at(Location::array_content(0)).contains_null() == false);
  CHECK(after.at(Location::array_content(0)).contains_null() == true);
}

TEST_CASE("saturate_subtypes closes content sets over descendants") {
  const char* doc = R"({
    "version": 1,
    "classes": [
      {"name": "VEHICLE", "parent": null, "fields": [], "methods": []},
      {"name": "CAR", "parent": "VEHICLE", "fields": [], "methods": []},
      {"name": "TRUCK", "parent": "VEHICLE", "fields": [], "methods": []},
      {"name": "LEAF", "parent": null, "fields": [], "methods": []},
      {"name": "MAIN", "parent": null, "fields": [], "methods": [
        {"name": "main", "params": [], "locals": ["a", "b"], "body": [
          {"op": "array_create", "into": {"place": "local", "name": "a"},
           "kind": "fast", "site": 0, "args": [2]},
          {"op": "array_extend", "target": {"place": "local", "name": "a"},
           "value": {"expr": "new", "class": "VEHICLE", "site": 10}},
          {"op": "array_create", "into": {"place": "local", "name": "b"},
           "kind": "fast", "site": 1, "args": [2]},
          {"op": "array_extend", "target": {"place": "local", "name": "b"},
           "value": {"expr": "new", "class": "LEAF", "site": 11}}
        ]}
      ]}
    ],
    "globals": [],
    "entry": "MAIN.main"
  })";
  Program p = parse_program(doc);
  ProgramIndex index(p);
  FlowResult after = saturate_subtypes(index);
  CHECK(set_names(index, after.at(Location::array_content(0))) ==
        std::vector<std::string>{"CAR", "NULL", "TRUCK", "VEHICLE"});
  // a leaf class gains only null
  CHECK(set_names(index, after.at(Location::array_content(1))) ==
        std::vector<std::string>{"LEAF", "NULL"});
}

TEST_CASE("worklist order does not change the result") {
  for (uint64_t seed = 0; seed < 25; ++seed) {
    CAPTURE(seed);
    Program p = random_program(seed);
    ProgramIndex index(p);
    AnalysisOptions fifo;
    fifo.order = AnalysisOptions::Order::Fifo;
    AnalysisOptions lifo;
    lifo.order = AnalysisOptions::Order::Lifo;
    REQUIRE(compute_type_sets(index, fifo) == compute_type_sets(index, lifo));
  }
}

TEST_CASE("statement permutation leaves the result unchanged") {
  for (uint64_t seed = 0; seed < 10; ++seed) {
    CAPTURE(seed);
    Program p = random_program(seed);
    ProgramIndex index(p);
    FlowResult base = compute_type_sets(index);
    Program mixed = shuffled(p, seed * 31 + 1);
    ProgramIndex mixed_index(mixed);
    REQUIRE(compute_type_sets(mixed_index) == base);
  }
}
