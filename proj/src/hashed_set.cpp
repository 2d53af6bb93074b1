#include "flexgc/hashed_set.hpp"

namespace flexgc {

namespace {

// splitmix64; stable within a run, which is all the contract asks for.
uint64_t hash_identity(uint32_t slot) {
  uint64_t z = slot + 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

FastArray HashedSet::make_buckets(int capacity, SiteId site) {
  if (capacity <= 0) {
    throw ContractViolation("hashed_set: capacity must be positive, got " +
                            std::to_string(capacity));
  }
  return FastArray::calloc_create(capacity, site);
}

HashedSet::HashedSet(Heap& heap, int capacity, SiteId buckets_site)
    : heap_(&heap),
      cell_type_(heap.ensure_class(kCellClass, std::nullopt,
                                   {kItemField, kNextField})),
      buckets_(make_buckets(capacity, buckets_site)) {}

ObjRef HashedSet::checked(CellValue item, const char* op) const {
  if (!item.is_ref()) {
    throw ContractViolation(std::string(op) +
                            ": item must be a non-null heap reference");
  }
  return item.as_ref();
}

int HashedSet::bucket_of(ObjRef item) const {
  return static_cast<int>(hash_identity(item.slot) %
                          static_cast<uint64_t>(buckets_.capacity()));
}

bool HashedSet::insert(CellValue item) {
  ObjRef ref = checked(item, "insert");
  if (contains(item)) return false;
  ObjRef cell = heap_->alloc_object(cell_type_);
  HeapObject& obj = heap_->object(cell);
  obj.fields[0] = CellValue::ref(ref);
  obj.fields[1] = buckets_.read(bucket_of(ref));
  buckets_.write(bucket_of(ref), CellValue::ref(cell));
  count_ += 1;
  return true;
}

bool HashedSet::contains(CellValue item) const {
  ObjRef ref = checked(item, "contains");
  CellValue head = buckets_.read(bucket_of(ref));
  while (!head.is_null()) {
    const HeapObject& cell = heap_->object(head.as_ref());
    if (cell.fields[0].is_ref() && cell.fields[0].as_ref() == ref) return true;
    head = cell.fields[1];
  }
  return false;
}

}  // namespace flexgc
