// Flexible-array abstract data types with an explicit used-area/supply-area
// split. The used area is the only part the accessors ever touch; the supply
// area is allocated but invisible, so it needs no initialization and the
// collector can skip it wholesale.
//
//   FastArray    zero-indexed, grows on the right
//   IndexedArray FastArray with an arbitrary lower bound
//   RingArray    circular array, grows on both ends
//   ZeroedArray  fixed-length zero-initialized array with a write watermark
#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "flexgc/cell.hpp"

namespace flexgc {

// Raised when an operation's precondition is violated (bad index, negative
// capacity, remove on empty). Bounds are always checked before any state
// change.
class ContractViolation : public std::runtime_error {
 public:
  explicit ContractViolation(const std::string& what)
      : std::runtime_error(what) {}
};

// What a slot holds while it belongs to the supply area.
//   Stale  fresh supply reads as the stale sentinel; a slot vacated by
//          remove_last keeps whatever value it had (nothing is reset).
//   Poison vacated slots are overwritten with the sentinel too, so any
//          access path that leaks into the supply area is detectable.
//   Zero   all supply slots hold null; this makes a full-capacity scan of
//          the storage safe and is what the reference collector relies on.
enum class SupplyFill : uint8_t { Stale, Poison, Zero };

class FastArray {
 public:
  FastArray(int capacity, SiteId site, SupplyFill fill = SupplyFill::Stale);

  // Equivalent to create(siz) followed by siz extends of null: size equals
  // capacity and every cell holds null, so there is no supply area. The
  // fill governs supply cells that appear later through growth or removal.
  static FastArray calloc_create(int siz, SiteId site,
                                 SupplyFill fill = SupplyFill::Stale);

  void extend(CellValue obj);
  CellValue read(int ind) const;
  void write(int ind, CellValue obj);
  void remove_last();

  int size() const { return size_; }
  int capacity() const { return static_cast<int>(storage_.size()); }
  SiteId content_site() const { return site_; }
  SupplyFill supply_fill() const { return fill_; }

  // Whole-storage view for the collector and for tests; not an accessor of
  // the abstract type. Cells at [size, capacity) are supply.
  const std::vector<CellValue>& storage() const { return storage_; }

 private:
  CellValue supply_value() const;
  void grow();

  std::vector<CellValue> storage_;
  int size_ = 0;
  SiteId site_;
  SupplyFill fill_;
};

// FastArray plus an index translation: logical index i maps to base index
// i - lower. Any integer works as the left-most index.
class IndexedArray {
 public:
  IndexedArray(int capacity, int lower, SiteId site,
               SupplyFill fill = SupplyFill::Stale);

  void extend(CellValue obj) { base_.extend(obj); }
  CellValue read(int ind) const;
  void write(int ind, CellValue obj);
  void remove_last() { base_.remove_last(); }

  int lower() const { return lower_; }
  int upper() const { return lower_ + base_.size() - 1; }
  int size() const { return base_.size(); }
  int capacity() const { return base_.capacity(); }
  SiteId content_site() const { return base_.content_site(); }

  FastArray& base() { return base_; }
  const FastArray& base() const { return base_; }

 private:
  FastArray base_;
  int lower_;
};

// Circular array. The user-visible window is [lower, upper]; storage_lower
// is the physical index of the element at logical index lower. The window
// unfolds circularly, so the supply area may sit in the middle of storage.
class RingArray {
 public:
  RingArray(int capacity, int lower, SiteId site,
            SupplyFill fill = SupplyFill::Stale);

  void extend(CellValue obj);
  void prepend(CellValue obj);
  CellValue read(int ind) const;
  void write(int ind, CellValue obj);

  int lower() const { return lower_; }
  int upper() const { return upper_; }
  int count() const { return upper_ - lower_ + 1; }
  int capacity() const { return static_cast<int>(storage_.size()); }
  int storage_lower() const { return storage_lower_; }
  SiteId content_site() const { return site_; }

  // Physical slot backing logical index ind; ind must be in [lower, upper].
  int physical_index(int ind) const;

  const std::vector<CellValue>& storage() const { return storage_; }

 private:
  CellValue supply_value() const;
  void grow();

  std::vector<CellValue> storage_;
  int lower_;
  int upper_;
  int storage_lower_ = 0;
  SiteId site_;
  SupplyFill fill_;
};

// Fixed-length array whose slots all start as null, in the style of managed
// arrays of references. gc_boundary is the highest index ever written; every
// slot above it still holds null, so the collector only needs to look at
// [0, gc_boundary].
class ZeroedArray {
 public:
  ZeroedArray(int length, SiteId site);

  // Bounds-checked write; on success the watermark advances to
  // max(gc_boundary, index). The watermark never decreases.
  void watermark_write(int index, CellValue obj);
  CellValue read(int index) const;

  int length() const { return static_cast<int>(storage_.size()); }
  int gc_boundary() const { return gc_boundary_; }
  SiteId content_site() const { return site_; }

  const std::vector<CellValue>& storage() const { return storage_; }

 private:
  std::vector<CellValue> storage_;
  int gc_boundary_ = 0;
  SiteId site_;
};

}  // namespace flexgc
