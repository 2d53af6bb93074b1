#include "flexgc/heap.hpp"

#include <sstream>

namespace flexgc {

MarkPlan derive_mark_plan(const TypeSet& ts) {
  MarkPlan plan;
  plan.null_possible = ts.contains_null();
  for (Member m : ts.members()) {
    if (!member_is_null(m)) plan.target_types.insert(m);
  }
  return plan;
}

MarkPlan universal_plan() {
  MarkPlan plan;
  plan.null_possible = true;
  plan.universal = true;
  return plan;
}

const MarkPlan& PlanTable::site_plan(SiteId site) const {
  static const MarkPlan fallback = universal_plan();
  auto it = site_plans_.find(site);
  return it == site_plans_.end() ? fallback : it->second;
}

const MarkPlan& PlanTable::field_plan(TypeId declared_in,
                                      const std::string& field) const {
  static const MarkPlan fallback = universal_plan();
  auto it = field_plans_.find({declared_in, field});
  return it == field_plans_.end() ? fallback : it->second;
}

std::string gc_stats_csv_header() {
  return "cycle,arrays_marked,cells_scanned,cells_skipped,capacity_total,"
         "objects_swept";
}

std::string gc_stats_csv_row(const GcStats& stats) {
  std::ostringstream out;
  out << stats.cycle << ',' << stats.arrays_marked << ',' << stats.cells_scanned
      << ',' << stats.cells_skipped << ',' << stats.capacity_total << ','
      << stats.objects_swept;
  return out.str();
}

// ---------------------------------------------------------------------------
// Heap

Heap::Heap(HeapConfig config) : config_(config) {}

TypeId Heap::declare_class(const std::string& name, std::optional<TypeId> parent,
                           std::vector<std::string> own_fields) {
  if (class_by_name_.count(name)) {
    throw std::invalid_argument("class already declared: " + name);
  }
  HeapClass cls;
  cls.name = name;
  cls.parent = parent;
  cls.own_fields = own_fields;
  if (parent) {
    cls.layout = classes_.at(static_cast<size_t>(*parent)).layout;
  }
  TypeId id = static_cast<TypeId>(classes_.size());
  for (auto& f : own_fields) cls.layout.push_back(FieldLayout{f, id});
  classes_.push_back(std::move(cls));
  class_by_name_[name] = id;
  return id;
}

TypeId Heap::ensure_class(const std::string& name, std::optional<TypeId> parent,
                          std::vector<std::string> own_fields) {
  auto it = class_by_name_.find(name);
  if (it != class_by_name_.end()) return it->second;
  return declare_class(name, parent, std::move(own_fields));
}

std::optional<TypeId> Heap::find_class(const std::string& name) const {
  auto it = class_by_name_.find(name);
  if (it == class_by_name_.end()) return std::nullopt;
  return it->second;
}

uint32_t Heap::new_slot(SlotValue value) {
  uint32_t index;
  if (!free_slots_.empty()) {
    index = free_slots_.back();
    free_slots_.pop_back();
    slots_[index].value = std::move(value);
  } else {
    index = static_cast<uint32_t>(slots_.size());
    slots_.push_back(Slot{false, false, std::move(value)});
  }
  slots_[index].live = true;
  slots_[index].mark = false;
  live_count_ += 1;
  return index;
}

ObjRef Heap::alloc_object(TypeId type) {
  if (type < 0 || type >= class_count()) {
    throw std::invalid_argument("alloc_object: unknown type id " +
                                std::to_string(type));
  }
  HeapObject obj;
  obj.type_id = type;
  obj.fields.assign(klass(type).layout.size(), CellValue::null());
  return ObjRef{new_slot(std::move(obj))};
}

ObjRef Heap::alloc_fast(int capacity, SiteId site) {
  return ObjRef{new_slot(FastArray(capacity, site, config_.supply_fill))};
}

ObjRef Heap::alloc_calloc(int siz, SiteId site) {
  return ObjRef{
      new_slot(FastArray::calloc_create(siz, site, config_.supply_fill))};
}

ObjRef Heap::alloc_indexed(int capacity, int lower, SiteId site) {
  return ObjRef{
      new_slot(IndexedArray(capacity, lower, site, config_.supply_fill))};
}

ObjRef Heap::alloc_ring(int capacity, int lower, SiteId site) {
  return ObjRef{new_slot(RingArray(capacity, lower, site, config_.supply_fill))};
}

ObjRef Heap::alloc_zeroed(int length, SiteId site) {
  return ObjRef{new_slot(ZeroedArray(length, site))};
}

bool Heap::is_live(ObjRef ref) const {
  return ref.slot < slots_.size() && slots_[ref.slot].live;
}

Heap::Slot& Heap::live_slot(ObjRef ref) {
  if (!is_live(ref)) {
    throw std::invalid_argument("dangling heap reference: slot " +
                                std::to_string(ref.slot));
  }
  return slots_[ref.slot];
}

const Heap::Slot& Heap::live_slot(ObjRef ref) const {
  if (!is_live(ref)) {
    throw std::invalid_argument("dangling heap reference: slot " +
                                std::to_string(ref.slot));
  }
  return slots_[ref.slot];
}

Heap::SlotKind Heap::kind(ObjRef ref) const {
  const SlotValue& v = live_slot(ref).value;
  if (std::holds_alternative<HeapObject>(v)) return SlotKind::Object;
  if (std::holds_alternative<FastArray>(v)) return SlotKind::Fast;
  if (std::holds_alternative<IndexedArray>(v)) return SlotKind::Indexed;
  if (std::holds_alternative<RingArray>(v)) return SlotKind::Ring;
  return SlotKind::Zeroed;
}

HeapObject& Heap::object(ObjRef ref) {
  return std::get<HeapObject>(live_slot(ref).value);
}

const HeapObject& Heap::object(ObjRef ref) const {
  return std::get<HeapObject>(live_slot(ref).value);
}

FastArray& Heap::fast(ObjRef ref) {
  return std::get<FastArray>(live_slot(ref).value);
}

IndexedArray& Heap::indexed(ObjRef ref) {
  return std::get<IndexedArray>(live_slot(ref).value);
}

RingArray& Heap::ring(ObjRef ref) {
  return std::get<RingArray>(live_slot(ref).value);
}

ZeroedArray& Heap::zeroed(ObjRef ref) {
  return std::get<ZeroedArray>(live_slot(ref).value);
}

Member Heap::member_of(ObjRef ref) const {
  const Slot& slot = live_slot(ref);
  if (const auto* obj = std::get_if<HeapObject>(&slot.value)) {
    return class_member(obj->type_id);
  }
  return site_member(site_of(ref));
}

SiteId Heap::site_of(ObjRef ref) const {
  const Slot& slot = live_slot(ref);
  if (const auto* fa = std::get_if<FastArray>(&slot.value))
    return fa->content_site();
  if (const auto* ia = std::get_if<IndexedArray>(&slot.value))
    return ia->content_site();
  if (const auto* ra = std::get_if<RingArray>(&slot.value))
    return ra->content_site();
  if (const auto* za = std::get_if<ZeroedArray>(&slot.value))
    return za->content_site();
  throw std::invalid_argument("site_of: slot holds an object");
}

// ---------------------------------------------------------------------------
// Mark phase

class Marker {
 public:
  Marker(Heap& heap, const PlanTable& plans, GcStats& stats)
      : heap_(heap), plans_(plans), stats_(stats) {}

  void mark_root(ObjRef ref) {
    push(ref);
    drain();
  }

  // One cell or field under its plan: null is a no-op when the plan allows
  // it, a reference must be one of the plan's targets.
  void mark_one_item(CellValue item, const MarkPlan& plan,
                     const std::string& where) {
    if (item.is_scalar()) return;  // not a path to another entity
    if (item.is_stale()) {
      throw PlanFault("supply-area sentinel reached the marker at " + where);
    }
    if (item.is_null()) {
      if (!plan.universal && !plan.null_possible) {
        throw PlanFault("null encountered at " + where +
                        " whose plan has no null");
      }
      return;
    }
    ObjRef ref = item.as_ref();
    if (!plan.universal) {
      Member m = heap_.member_of(ref);
      if (!plan.target_types.contains(m)) {
        throw PlanFault("value of type " + describe_member(m) + " at " + where +
                        " is outside the plan's targets");
      }
    }
    push(ref);
  }

 private:
  void push(ObjRef ref) {
    Heap::Slot& slot = heap_.live_slot(ref);
    if (slot.mark) return;
    slot.mark = true;
    work_.push_back(ref.slot);
  }

  void drain() {
    while (!work_.empty()) {
      ObjRef ref{work_.back()};
      work_.pop_back();
      Heap::Slot& slot = heap_.slots_[ref.slot];
      if (auto* obj = std::get_if<HeapObject>(&slot.value)) {
        mark_object(*obj);
      } else {
        mark_array(ref, slot.value);
      }
    }
  }

  void mark_object(const HeapObject& obj) {
    const HeapClass& cls = heap_.klass(obj.type_id);
    for (size_t i = 0; i < obj.fields.size(); ++i) {
      const FieldLayout& fl = cls.layout[i];
      const MarkPlan& plan = plans_.field_plan(fl.declared_in, fl.name);
      mark_one_item(obj.fields[i], plan,
                    "field " + heap_.klass(fl.declared_in).name + "." + fl.name);
    }
  }

  // Exactly the used cells are visited: [0, size) for flat arrays, count
  // cells starting at storage_lower for rings, [0, gc_boundary] for zeroed
  // arrays. The rest is the supply area and is skipped unvisited.
  void mark_array(ObjRef ref, const Heap::SlotValue& value) {
    SiteId site = heap_.site_of(ref);
    const MarkPlan& plan = plans_.site_plan(site);
    std::string where = "array site " + std::to_string(site);

    const FastArray* fa = std::get_if<FastArray>(&value);
    if (const auto* ia = std::get_if<IndexedArray>(&value)) fa = &ia->base();

    if (fa != nullptr) {
      for (int i = 0; i < fa->size(); ++i) {
        mark_one_item(fa->storage()[static_cast<size_t>(i)], plan, where);
      }
      record(fa->size(), fa->capacity());
    } else if (const auto* ra = std::get_if<RingArray>(&value)) {
      int idx = ra->storage_lower();
      for (int c = 0; c < ra->count(); ++c) {
        mark_one_item(ra->storage()[static_cast<size_t>(idx)], plan, where);
        idx += 1;
        if (idx >= ra->capacity()) idx -= ra->capacity();
      }
      record(ra->count(), ra->capacity());
    } else {
      const auto& za = std::get<ZeroedArray>(value);
      if (za.length() == 0) {
        record(0, 0);
      } else {
        for (int i = 0; i <= za.gc_boundary(); ++i) {
          mark_one_item(za.storage()[static_cast<size_t>(i)], plan, where);
        }
        record(za.gc_boundary() + 1, za.length());
      }
    }
  }

  void record(int64_t used, int64_t capacity) {
    stats_.arrays_marked += 1;
    stats_.cells_scanned += used;
    stats_.cells_skipped += capacity - used;
    stats_.capacity_total += capacity;
    stats_.array_records.push_back(ArrayRecord{used, capacity});
  }

  std::string describe_member(Member m) const {
    if (member_is_class(m)) return "class " + heap_.klass(member_class_id(m)).name;
    return "array site " + std::to_string(member_site_id(m));
  }

  Heap& heap_;
  const PlanTable& plans_;
  GcStats& stats_;
  std::vector<uint32_t> work_;
};

GcStats Heap::collect(const std::vector<ObjRef>& roots,
                      const PlanTable& plans) {
  GcStats stats;
  stats.cycle = ++cycles_;

  Marker marker(*this, plans, stats);
  for (ObjRef root : roots) {
    if (is_live(root)) marker.mark_root(root);
  }

  for (uint32_t i = 0; i < slots_.size(); ++i) {
    Slot& slot = slots_[i];
    if (!slot.live) continue;
    if (slot.mark) {
      slot.mark = false;
      continue;
    }
    if (trace_sink_ != nullptr &&
        !std::holds_alternative<HeapObject>(slot.value)) {
      trace_sink_->on_event(TraceEvent::free(i));
    }
    slot.value = HeapObject{};  // drop storage
    slot.live = false;
    free_slots_.push_back(i);
    live_count_ -= 1;
    stats.objects_swept += 1;
  }
  return stats;
}

}  // namespace flexgc
