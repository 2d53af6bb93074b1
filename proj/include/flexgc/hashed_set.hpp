// Hash set over a primary bucket array. The bucket array is created with
// calloc semantics so its size equals its capacity and every bucket starts
// as null; a null bucket means "not present" and a non-null bucket heads a
// chain of collision cells allocated on the heap.
#pragma once

#include "flexgc/heap.hpp"

namespace flexgc {

class HashedSet {
 public:
  // Capacity is fixed for the lifetime of the set and must be positive.
  HashedSet(Heap& heap, int capacity, SiteId buckets_site);

  // Inserts at the head of the bucket's chain; returns false when the item
  // is already present. The item must be a heap reference, never null.
  bool insert(CellValue item);
  bool contains(CellValue item) const;

  int count() const { return count_; }
  int capacity() const { return buckets_.capacity(); }
  const FastArray& buckets() const { return buckets_; }

  // Chain cells carry these field names; their class is registered in the
  // heap on first use.
  static constexpr const char* kCellClass = "$hash_cell";
  static constexpr const char* kItemField = "item";
  static constexpr const char* kNextField = "next";

 private:
  static FastArray make_buckets(int capacity, SiteId site);
  ObjRef checked(CellValue item, const char* op) const;
  int bucket_of(ObjRef item) const;

  Heap* heap_;
  TypeId cell_type_;
  FastArray buckets_;
  int count_ = 0;
};

}  // namespace flexgc
