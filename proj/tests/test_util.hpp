// Shared test helpers: a deterministic RNG, two independent heap
// traversals (used-area and full-capacity) used as collection oracles, and
// a randomized ADT workload driver that builds heaps while tracking the
// exact member sets written per site and field.
#pragma once

#include <map>
#include <set>
#include <vector>

#include "flexgc/hashed_set.hpp"
#include "flexgc/heap.hpp"
#include "flexgc/interp.hpp"
#include "flexgc/typeflow.hpp"

namespace flexgc::testutil {

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
  bool pct(int p) { return below(100) < p; }
};

// Reachability following only the used areas, reimplemented independently
// of the collector (reads go through the ADT accessors).
inline std::set<uint32_t> used_area_reachable(const Heap& heap,
                                              const std::vector<ObjRef>& roots) {
  std::set<uint32_t> seen;
  std::vector<ObjRef> work;
  auto push = [&](CellValue v) {
    if (v.is_ref() && seen.insert(v.as_ref().slot).second) {
      work.push_back(v.as_ref());
    }
  };
  for (ObjRef r : roots) push(CellValue::ref(r));
  while (!work.empty()) {
    ObjRef ref = work.back();
    work.pop_back();
    switch (heap.kind(ref)) {
      case Heap::SlotKind::Object:
        for (const CellValue& f : heap.object(ref).fields) push(f);
        break;
      case Heap::SlotKind::Fast: {
        const FastArray& a = const_cast<Heap&>(heap).fast(ref);
        for (int i = 0; i < a.size(); ++i) push(a.read(i));
        break;
      }
      case Heap::SlotKind::Indexed: {
        const IndexedArray& a = const_cast<Heap&>(heap).indexed(ref);
        for (int i = a.lower(); i <= a.upper(); ++i) push(a.read(i));
        break;
      }
      case Heap::SlotKind::Ring: {
        const RingArray& a = const_cast<Heap&>(heap).ring(ref);
        for (int i = a.lower(); i <= a.upper(); ++i) push(a.read(i));
        break;
      }
      case Heap::SlotKind::Zeroed: {
        const ZeroedArray& a = const_cast<Heap&>(heap).zeroed(ref);
        for (int i = 0; i <= a.gc_boundary() && i < a.length(); ++i) {
          push(a.read(i));
        }
        break;
      }
    }
  }
  return seen;
}

// Reference collector traversal: scans the full capacity of every array.
// Only safe on heaps built with SupplyFill::Zero, where supply slots hold
// null instead of stale values.
inline std::set<uint32_t> full_scan_reachable(const Heap& heap,
                                              const std::vector<ObjRef>& roots) {
  std::set<uint32_t> seen;
  std::vector<ObjRef> work;
  auto push = [&](CellValue v) {
    if (v.is_ref() && seen.insert(v.as_ref().slot).second) {
      work.push_back(v.as_ref());
    }
  };
  auto scan_all = [&](const std::vector<CellValue>& storage) {
    for (const CellValue& v : storage) push(v);
  };
  for (ObjRef r : roots) push(CellValue::ref(r));
  while (!work.empty()) {
    ObjRef ref = work.back();
    work.pop_back();
    switch (heap.kind(ref)) {
      case Heap::SlotKind::Object:
        for (const CellValue& f : heap.object(ref).fields) push(f);
        break;
      case Heap::SlotKind::Fast:
        scan_all(const_cast<Heap&>(heap).fast(ref).storage());
        break;
      case Heap::SlotKind::Indexed:
        scan_all(const_cast<Heap&>(heap).indexed(ref).base().storage());
        break;
      case Heap::SlotKind::Ring:
        scan_all(const_cast<Heap&>(heap).ring(ref).storage());
        break;
      case Heap::SlotKind::Zeroed:
        scan_all(const_cast<Heap&>(heap).zeroed(ref).storage());
        break;
    }
  }
  return seen;
}

inline std::set<uint32_t> live_slots(const Heap& heap) {
  std::set<uint32_t> out;
  heap.for_each_live([&](ObjRef ref) { out.insert(ref.slot); });
  return out;
}

// Expected per-cycle accounting, recomputed from the reachable arrays with
// the used/supply formulas applied directly.
struct SkipAccount {
  int64_t arrays = 0;
  int64_t scanned = 0;
  int64_t skipped = 0;
  int64_t capacity = 0;
};

inline SkipAccount expected_skip_account(const Heap& heap,
                                         const std::set<uint32_t>& reachable) {
  SkipAccount acc;
  Heap& h = const_cast<Heap&>(heap);
  for (uint32_t slot : reachable) {
    ObjRef ref{slot};
    switch (heap.kind(ref)) {
      case Heap::SlotKind::Object:
        break;
      case Heap::SlotKind::Fast: {
        const FastArray& a = h.fast(ref);
        acc.arrays += 1;
        acc.scanned += a.size();
        acc.skipped += a.capacity() - a.size();
        acc.capacity += a.capacity();
        break;
      }
      case Heap::SlotKind::Indexed: {
        const IndexedArray& a = h.indexed(ref);
        acc.arrays += 1;
        acc.scanned += a.size();
        acc.skipped += a.capacity() - a.size();
        acc.capacity += a.capacity();
        break;
      }
      case Heap::SlotKind::Ring: {
        const RingArray& a = h.ring(ref);
        acc.arrays += 1;
        acc.scanned += a.count();
        acc.skipped += a.capacity() - a.count();
        acc.capacity += a.capacity();
        break;
      }
      case Heap::SlotKind::Zeroed: {
        const ZeroedArray& a = h.zeroed(ref);
        acc.arrays += 1;
        if (a.length() > 0) {
          acc.scanned += a.gc_boundary() + 1;
          acc.skipped += a.length() - 1 - a.gc_boundary();
          acc.capacity += a.length();
        }
        break;
      }
    }
  }
  return acc;
}

// Random ADT workload over a heap: allocates objects and arrays of every
// kind, wires references through fields and cells, drops roots to make
// garbage, and tracks the exact member set written per site and per field
// so fully precise MarkPlans can be derived. The op sequence depends only
// on the seed, never on the supply fill, so a workload can be replayed
// against the zeroing oracle configuration.
class AdtWorkload {
 public:
  AdtWorkload(uint64_t seed, SupplyFill fill, int64_t steps = 300)
      : rng_(seed), heap_(HeapConfig{fill, 1 << 30}) {
    type_a_ = heap_.declare_class("A", std::nullopt, {"left", "right"});
    type_b_ = heap_.declare_class("B", type_a_, {"extra"});
    type_c_ = heap_.declare_class("C", std::nullopt, {"peer"});
    seed_field_tracking();
    for (int64_t i = 0; i < steps; ++i) step();
  }

  Heap& heap() { return heap_; }
  const std::vector<ObjRef>& roots() const { return roots_; }

  PlanTable exact_plans() const {
    PlanTable plans;
    for (const auto& [site, set] : site_written_) {
      plans.set_site_plan(site, derive_mark_plan(set));
    }
    for (const auto& [key, set] : field_written_) {
      plans.set_field_plan(key.first, key.second, derive_mark_plan(set));
    }
    return plans;
  }

  // Count of sites whose tracked content set has no null member.
  std::vector<SiteId> null_free_sites() const {
    std::vector<SiteId> out;
    for (const auto& [site, set] : site_written_) {
      if (!set.contains_null()) out.push_back(site);
    }
    return out;
  }

 private:
  void seed_field_tracking() {
    // Object allocation writes null into every field.
    field_written_[{type_a_, "left"}].insert(kNullMember);
    field_written_[{type_a_, "right"}].insert(kNullMember);
    field_written_[{type_b_, "extra"}].insert(kNullMember);
    field_written_[{type_c_, "peer"}].insert(kNullMember);
  }

  CellValue pick_value() {
    // Mix of null, objects, arrays and the odd scalar.
    int roll = rng_.below(10);
    if (roll < 2) return CellValue::null();
    if (roll < 3) return CellValue::scalar(rng_.below(1000));
    if (roll < 7 || arrays_.empty()) {
      TypeId t = rng_.below(3) == 0   ? type_c_
                 : rng_.below(2) == 0 ? type_a_
                                      : type_b_;
      return CellValue::ref(heap_.alloc_object(t));
    }
    return CellValue::ref(arrays_[static_cast<size_t>(
        rng_.below(static_cast<int>(arrays_.size())))]);
  }

  Member value_member(CellValue v) {
    if (v.is_null()) return kNullMember;
    if (v.is_scalar()) return kNullMember;  // placeholder, not recorded
    return heap_.member_of(v.as_ref());
  }

  void record_site(SiteId site, CellValue v) {
    if (v.is_scalar()) return;
    site_written_[site].insert(value_member(v));
  }

  void step() {
    switch (rng_.below(8)) {
      case 0: {  // new rooted object
        TypeId t = rng_.below(2) == 0 ? type_a_ : (rng_.below(2) ? type_b_ : type_c_);
        roots_.push_back(heap_.alloc_object(t));
        break;
      }
      case 1: {  // new array of a random kind, rooted
        SiteId site = next_site_++;
        ObjRef ref;
        switch (rng_.below(5)) {
          case 0: ref = heap_.alloc_fast(rng_.below(6), site); break;
          case 1: ref = heap_.alloc_indexed(rng_.below(6), rng_.below(9) - 4, site); break;
          case 2: ref = heap_.alloc_ring(rng_.below(6), rng_.below(9) - 4, site); break;
          case 3:
            ref = heap_.alloc_calloc(rng_.below(6), site);
            site_written_[site].insert(kNullMember);
            break;
          default:
            ref = heap_.alloc_zeroed(1 + rng_.below(6), site);
            site_written_[site].insert(kNullMember);
            break;
        }
        site_written_[site];  // materialize even if never written
        arrays_.push_back(ref);
        roots_.push_back(ref);
        break;
      }
      case 2: {  // array traffic
        if (arrays_.empty()) break;
        ObjRef ref = arrays_[static_cast<size_t>(
            rng_.below(static_cast<int>(arrays_.size())))];
        if (!heap_.is_live(ref)) break;
        array_op(ref);
        break;
      }
      case 3: {  // field write
        if (roots_.empty()) break;
        ObjRef ref = roots_[static_cast<size_t>(
            rng_.below(static_cast<int>(roots_.size())))];
        if (!heap_.is_live(ref) || heap_.kind(ref) != Heap::SlotKind::Object) {
          break;
        }
        HeapObject& obj = heap_.object(ref);
        const HeapClass& cls = heap_.klass(obj.type_id);
        if (cls.layout.empty()) break;
        size_t f = static_cast<size_t>(
            rng_.below(static_cast<int>(cls.layout.size())));
        CellValue v = pick_value();
        obj.fields[f] = v;
        if (!v.is_scalar()) {
          field_written_[{cls.layout[f].declared_in, cls.layout[f].name}]
              .insert(value_member(v));
        }
        break;
      }
      case 4: {  // hashed set traffic (cells are heap objects)
        if (!hashed_) {
          SiteId site = next_site_++;
          hashed_.emplace(heap_, 8, site);
          site_written_[site].insert(kNullMember);
          hash_site_ = site;
          if (auto cell = heap_.find_class(HashedSet::kCellClass)) {
            field_written_[{*cell, HashedSet::kItemField}].insert(kNullMember);
            field_written_[{*cell, HashedSet::kNextField}].insert(kNullMember);
          }
        }
        if (roots_.empty()) break;
        ObjRef item = roots_[static_cast<size_t>(
            rng_.below(static_cast<int>(roots_.size())))];
        if (!heap_.is_live(item) || heap_.kind(item) != Heap::SlotKind::Object) {
          break;
        }
        hashed_->insert(CellValue::ref(item));
        if (auto cell = heap_.find_class(HashedSet::kCellClass)) {
          site_written_[hash_site_].insert(class_member(*cell));
          field_written_[{*cell, HashedSet::kItemField}].insert(
              heap_.member_of(item));
          field_written_[{*cell, HashedSet::kNextField}].insert(
              class_member(*cell));
        }
        break;
      }
      case 5: {  // drop a root: garbage appears
        if (roots_.size() < 4) break;
        size_t i = static_cast<size_t>(
            rng_.below(static_cast<int>(roots_.size())));
        roots_.erase(roots_.begin() + static_cast<ptrdiff_t>(i));
        break;
      }
      default:
        if (!arrays_.empty()) {
          ObjRef ref = arrays_[static_cast<size_t>(
              rng_.below(static_cast<int>(arrays_.size())))];
          if (heap_.is_live(ref)) array_op(ref);
        }
        break;
    }
  }

  void array_op(ObjRef ref) {
    SiteId site = heap_.site_of(ref);
    switch (heap_.kind(ref)) {
      case Heap::SlotKind::Fast: {
        FastArray& a = heap_.fast(ref);
        int roll = rng_.below(4);
        if (roll == 0 && a.size() > 0) {
          a.remove_last();
        } else if (roll == 1 && a.size() > 0) {
          CellValue v = pick_value();
          a.write(rng_.below(a.size()), v);
          record_site(site, v);
        } else {
          CellValue v = pick_value();
          a.extend(v);
          record_site(site, v);
        }
        break;
      }
      case Heap::SlotKind::Indexed: {
        IndexedArray& a = heap_.indexed(ref);
        int roll = rng_.below(4);
        if (roll == 0 && a.size() > 0) {
          a.remove_last();
        } else if (roll == 1 && a.size() > 0) {
          CellValue v = pick_value();
          a.write(a.lower() + rng_.below(a.size()), v);
          record_site(site, v);
        } else {
          CellValue v = pick_value();
          a.extend(v);
          record_site(site, v);
        }
        break;
      }
      case Heap::SlotKind::Ring: {
        RingArray& a = heap_.ring(ref);
        int roll = rng_.below(4);
        CellValue v = pick_value();
        if (roll == 0) {
          a.prepend(v);
        } else if (roll == 1 && a.count() > 0) {
          a.write(a.lower() + rng_.below(a.count()), v);
        } else {
          a.extend(v);
        }
        record_site(site, v);
        break;
      }
      case Heap::SlotKind::Zeroed: {
        ZeroedArray& a = heap_.zeroed(ref);
        if (a.length() == 0) break;
        CellValue v = pick_value();
        a.watermark_write(rng_.below(a.length()), v);
        record_site(site, v);
        break;
      }
      case Heap::SlotKind::Object:
        break;
    }
  }

  Rng rng_;
  Heap heap_;
  TypeId type_a_, type_b_, type_c_;
  std::vector<ObjRef> roots_;
  std::vector<ObjRef> arrays_;
  std::optional<HashedSet> hashed_;
  SiteId hash_site_ = -1;
  SiteId next_site_ = 0;
  std::map<SiteId, TypeSet> site_written_;
  std::map<std::pair<TypeId, std::string>, TypeSet> field_written_;
};

// Checks a run against analysis results: every observed member must be in
// the static set of its location, runtime null dereferences must be flagged
// call sites, and null must never be read from a site whose content set
// lacks it. Returns human-readable violations; empty means sound.
inline std::vector<std::string> soundness_violations(const ProgramIndex& p,
                                                     const FlowResult& flow,
                                                     const RunTrace& trace) {
  std::vector<std::string> issues;
  for (const auto& [loc, counts] : trace.observed) {
    const TypeSet& statics = flow.at(loc);
    for (const auto& [member, n] : counts) {
      if (!statics.contains(member)) {
        issues.push_back(loc.describe(p) + " observed " +
                         member_to_string(p, member) + " outside its set");
      }
    }
  }
  for (int uid : trace.null_dereference_events) {
    if (!flow.null_dereference_sites.count(uid)) {
      issues.push_back("null receiver at call uid " + std::to_string(uid) +
                       " was not flagged statically");
    }
  }
  for (SiteId site : trace.null_read_sites) {
    if (!flow.at(Location::array_content(site)).contains_null()) {
      issues.push_back("null read from site " + std::to_string(site) +
                       " whose content set has no null");
    }
  }
  return issues;
}

}  // namespace flexgc::testutil
