// Modeled heap with a precise stop-the-world mark-sweep collector. The
// marking of arrays visits only their used areas and is specialized per
// allocation site by MarkPlans: when a site's content set lacks null the
// null check is elided, and a mismatch between a plan and what marking
// actually encounters is a hard fault, not a silent fallback.
#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "flexgc/cell.hpp"
#include "flexgc/flexarray.hpp"
#include "flexgc/trace.hpp"
#include "flexgc/typeset.hpp"

namespace flexgc {

using TypeId = int32_t;

struct FieldLayout {
  std::string name;
  TypeId declared_in;  // class that introduced the field
};

struct HeapClass {
  std::string name;
  std::optional<TypeId> parent;
  std::vector<std::string> own_fields;
  std::vector<FieldLayout> layout;  // inherited fields first, then own
};

struct HeapObject {
  TypeId type_id = 0;
  std::vector<CellValue> fields;  // parallel to HeapClass::layout
};

// Marking specialization for one array site or object field, derived from
// its content type set. target_types never contains the null member.
struct MarkPlan {
  bool null_possible = false;
  bool universal = false;  // conservative: accept and traverse anything
  TypeSet target_types;

  enum class Dispatch : uint8_t { None, Direct, Switch };
  // None: nothing to mark. Direct: single target, no type switch. Switch:
  // dispatch over the target set.
  Dispatch dispatch() const {
    if (universal || target_types.size() > 1) return Dispatch::Switch;
    return target_types.size() == 1 ? Dispatch::Direct : Dispatch::None;
  }
};

MarkPlan derive_mark_plan(const TypeSet& ts);
MarkPlan universal_plan();

// Plans per array site and per object field. Lookups fall back to the
// universal plan so a heap can always be collected without analysis results.
class PlanTable {
 public:
  void set_site_plan(SiteId site, MarkPlan plan) {
    site_plans_[site] = std::move(plan);
  }
  void set_field_plan(TypeId declared_in, const std::string& field,
                      MarkPlan plan) {
    field_plans_[{declared_in, field}] = std::move(plan);
  }

  const MarkPlan& site_plan(SiteId site) const;
  const MarkPlan& field_plan(TypeId declared_in, const std::string& field) const;

 private:
  std::map<SiteId, MarkPlan> site_plans_;
  std::map<std::pair<TypeId, std::string>, MarkPlan> field_plans_;
};

// Marking hit a value the plan rules out: null where null_possible is
// false, or a reference whose dynamic type is outside target_types. The
// collection cycle aborts with this diagnostic.
class PlanFault : public std::runtime_error {
 public:
  explicit PlanFault(const std::string& what) : std::runtime_error(what) {}
};

struct ArrayRecord {
  int64_t size = 0;      // used cells scanned
  int64_t capacity = 0;  // total cells
};

struct GcStats {
  int64_t cycle = 0;
  int64_t arrays_marked = 0;
  int64_t cells_scanned = 0;
  int64_t cells_skipped = 0;
  int64_t capacity_total = 0;
  int64_t objects_swept = 0;
  std::vector<ArrayRecord> array_records;  // one per marked array
};

std::string gc_stats_csv_header();
std::string gc_stats_csv_row(const GcStats& stats);

struct HeapConfig {
  SupplyFill supply_fill = SupplyFill::Stale;
  int64_t gc_budget = 4096;  // live entities before a collection is wanted
};

class Heap {
 public:
  enum class SlotKind : uint8_t { Object, Fast, Indexed, Ring, Zeroed };

  explicit Heap(HeapConfig config = {});

  // Class registry. declare_class rejects duplicate names; ensure_class
  // returns the existing id instead.
  TypeId declare_class(const std::string& name, std::optional<TypeId> parent,
                       std::vector<std::string> own_fields);
  TypeId ensure_class(const std::string& name, std::optional<TypeId> parent,
                      std::vector<std::string> own_fields);
  const HeapClass& klass(TypeId id) const { return classes_.at(static_cast<size_t>(id)); }
  std::optional<TypeId> find_class(const std::string& name) const;
  int32_t class_count() const { return static_cast<int32_t>(classes_.size()); }

  ObjRef alloc_object(TypeId type);
  ObjRef alloc_fast(int capacity, SiteId site);
  ObjRef alloc_calloc(int siz, SiteId site);
  ObjRef alloc_indexed(int capacity, int lower, SiteId site);
  ObjRef alloc_ring(int capacity, int lower, SiteId site);
  ObjRef alloc_zeroed(int length, SiteId site);

  bool is_live(ObjRef ref) const;
  SlotKind kind(ObjRef ref) const;
  HeapObject& object(ObjRef ref);
  const HeapObject& object(ObjRef ref) const;
  FastArray& fast(ObjRef ref);
  IndexedArray& indexed(ObjRef ref);
  RingArray& ring(ObjRef ref);
  ZeroedArray& zeroed(ObjRef ref);

  // Class member for objects, site member for arrays; what plan checks and
  // type observations use as the value's dynamic type.
  Member member_of(ObjRef ref) const;
  // Site of the array in the slot (arrays only).
  SiteId site_of(ObjRef ref) const;

  int64_t live_count() const { return live_count_; }
  bool over_budget() const { return live_count_ > config_.gc_budget; }
  const HeapConfig& config() const { return config_; }

  template <typename Fn>
  void for_each_live(Fn&& fn) const {
    for (uint32_t i = 0; i < slots_.size(); ++i)
      if (slots_[i].live) fn(ObjRef{i});
  }

  // Mark from the roots through object fields and used-area cells, then
  // sweep everything unmarked. Throws PlanFault when marking meets a value
  // its plan rules out.
  GcStats collect(const std::vector<ObjRef>& roots, const PlanTable& plans);

  // Free events for swept arrays are reported here when set.
  void set_trace_sink(TraceSink* sink) { trace_sink_ = sink; }
  TraceSink* trace_sink() const { return trace_sink_; }

 private:
  friend class Marker;

  using SlotValue =
      std::variant<HeapObject, FastArray, IndexedArray, RingArray, ZeroedArray>;

  struct Slot {
    bool live = false;
    bool mark = false;
    SlotValue value;
  };

  uint32_t new_slot(SlotValue value);
  Slot& live_slot(ObjRef ref);
  const Slot& live_slot(ObjRef ref) const;

  HeapConfig config_;
  std::vector<HeapClass> classes_;
  std::map<std::string, TypeId> class_by_name_;
  // deque: growth never invalidates references handed out by the accessors
  std::deque<Slot> slots_;
  std::vector<uint32_t> free_slots_;
  int64_t live_count_ = 0;
  int64_t cycles_ = 0;
  TraceSink* trace_sink_ = nullptr;
};

}  // namespace flexgc
