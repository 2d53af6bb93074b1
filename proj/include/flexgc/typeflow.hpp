// Flow-insensitive whole-program type flow analysis. Computes, per storage
// location, the set of possible dynamic types, with null as an ordinary set
// member and one smashed content set per array allocation site. Dispatch is
// simulated over receiver sets, and reachability is co-computed with the
// sets in a single worklist fixpoint.
#pragma once

#include <map>
#include <set>
#include <string>

#include "flexgc/ir.hpp"
#include "flexgc/typeset.hpp"

namespace flexgc {

struct Location {
  enum class Kind : uint8_t { Local, Global, Field, Param, Return, ArrayContent };

  Kind kind = Kind::Global;
  int32_t owner = -1;  // method id (Local/Param/Return), class id (Field), site (ArrayContent)
  int32_t index = 0;   // parameter index
  std::string name;    // local / global / field name

  static Location local(MethodId m, std::string name);
  static Location global(std::string name);
  static Location field(ClassId cls, std::string name);
  static Location param(MethodId m, int index);
  static Location ret(MethodId m);
  static Location array_content(SiteId site);

  friend bool operator<(const Location& a, const Location& b) {
    return std::tie(a.kind, a.owner, a.index, a.name) <
           std::tie(b.kind, b.owner, b.index, b.name);
  }
  friend bool operator==(const Location& a, const Location& b) {
    return a.kind == b.kind && a.owner == b.owner && a.index == b.index &&
           a.name == b.name;
  }

  std::string describe(const ProgramIndex& p) const;
};

struct FlowResult {
  std::map<Location, TypeSet> sets;
  std::set<MethodId> reachable_methods;
  // Statement uids of calls whose receiver set contains null.
  std::set<int> null_dereference_sites;

  const TypeSet& at(const Location& loc) const;

  friend bool operator==(const FlowResult& a, const FlowResult& b) {
    return a.sets == b.sets && a.reachable_methods == b.reachable_methods &&
           a.null_dereference_sites == b.null_dereference_sites;
  }
};

struct AnalysisOptions {
  // Saturation experiments: Null artificially adds null to every array
  // content set; Subtypes additionally closes content sets under declared
  // descendants. Both run as standing rules inside the fixpoint.
  enum class Saturation : uint8_t { None, Null, Subtypes };
  // Worklist discipline; the fixpoint result must not depend on it.
  enum class Order : uint8_t { Fifo, Lifo };

  Saturation saturation = Saturation::None;
  Order order = Order::Fifo;
};

FlowResult compute_type_sets(const ProgramIndex& p, AnalysisOptions opts = {});

// Reachability alone (co-computed with the sets; exposed for reporting).
std::set<MethodId> compute_reachable(const ProgramIndex& p);

// Re-runs the fixpoint with the saturation rule switched on. Results are
// pointwise supersets of what compute_type_sets returns.
FlowResult saturate_null(const ProgramIndex& p);
FlowResult saturate_subtypes(const ProgramIndex& p);

struct DispatchResult {
  std::set<MethodId> targets;
  bool null_receiver = false;  // null was in the receiver set
};

// Nearest ancestor-or-self definition per non-null class member. With
// strict=true a class lacking the method anywhere is a resolution error
// (ValidateError); the analysis itself runs non-strict and skips such
// members.
DispatchResult dispatch_targets(const ProgramIndex& p, const TypeSet& receiver,
                                const std::string& method, bool strict = true);

std::string member_to_string(const ProgramIndex& p, Member m);

// Per-location member lists plus reachable methods and flagged call sites,
// as a JSON document.
std::string flow_result_to_json(const ProgramIndex& p, const FlowResult& r);

}  // namespace flexgc
