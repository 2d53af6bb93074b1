// Interpreter for the program representation. Executes from the entry
// method with dynamic dispatch on the receiver's runtime type, records the
// observed dynamic types per storage location, triggers collections against
// a heap budget, and can emit the runtime allocation trace.
#pragma once

#include <map>
#include <optional>
#include <set>
#include <vector>

#include "flexgc/heap.hpp"
#include "flexgc/ir.hpp"
#include "flexgc/trace.hpp"
#include "flexgc/typeflow.hpp"

namespace flexgc {

struct RunTrace {
  // Multiset of observed dynamic types per location, recorded at every
  // store: assignments, parameter bindings, returns, array content writes.
  std::map<Location, std::map<Member, int64_t>> observed;
  // Call statements (by uid) that were reached with a null receiver; the
  // call is recorded and skipped.
  std::set<int> null_dereference_events;
  // Array sites from which a read returned null.
  std::set<SiteId> null_read_sites;
  std::vector<GcStats> gc_cycles;
  int64_t steps = 0;
  bool completed = false;
  // Contract violations from the arrays, plan faults from the collector,
  // and interpreter-detected errors all end the run and land here.
  std::optional<std::string> fault;
};

struct InterpOptions {
  int64_t step_budget = 1'000'000;
  int64_t gc_budget = 4096;  // live heap entities before a collection runs
  int max_call_depth = 256;
  SupplyFill supply_fill = SupplyFill::Stale;
  TraceSink* trace_sink = nullptr;   // runtime allocation trace, if set
  const PlanTable* plans = nullptr;  // defaults to plans derived from typeflow
};

// MarkPlans from analysis results: one per array content set, one per field
// set. Class ids double as heap type ids.
PlanTable plans_from_flow(const FlowResult& flow);

class Interpreter {
 public:
  Interpreter(const ProgramIndex& p, InterpOptions opts = {});

  // Runs once from the entry method.
  RunTrace run();

  // Final heap state, for inspection after run().
  Heap& heap() { return heap_; }
  const Heap& heap() const { return heap_; }
  const PlanTable& plans() const { return plans_; }

  // Live roots right now: globals, every frame, pending temporaries.
  std::vector<ObjRef> roots() const;

 private:
  struct Frame {
    MethodId method;
    std::vector<CellValue> params;
    std::vector<std::optional<CellValue>> locals;  // unbound until assigned
  };

  struct Fault {
    std::string message;
  };
  struct BudgetExhausted {};

  friend class TempRoots;

  void step();
  void maybe_collect();
  ObjRef allocate_array(const ArrayCreate& node);

  Frame& frame() { return frames_.back(); }
  const Method& method_of(MethodId m) const { return *p_.method(m).method; }

  std::optional<Member> value_member(CellValue v) const;
  void observe(const Location& loc, CellValue v);

  CellValue eval(const Expr& e);
  CellValue read_place(const Place& place);
  void write_place(const Place& place, CellValue v);
  void exec(const Stmt& stmt);
  std::optional<CellValue> run_method(MethodId m, std::vector<CellValue> args);

  ObjRef array_at(const Place& place, const char* op);
  void emit(const TraceEvent& ev);

  const ProgramIndex& p_;
  InterpOptions opts_;
  PlanTable plans_;
  Heap heap_;
  RunTrace trace_;
  std::map<std::string, CellValue> globals_;  // bound globals only
  std::vector<Frame> frames_;
  std::vector<CellValue> temps_;  // rooted intermediates
};

// Convenience wrapper when the final heap is not needed.
RunTrace interpret(const ProgramIndex& p, InterpOptions opts = {});

}  // namespace flexgc
