#include "flexgc/flexarray.hpp"

namespace flexgc {

namespace {

std::string bad_index(const char* op, int ind, int size) {
  return std::string(op) + ": index " + std::to_string(ind) +
         " outside used area [0, " + std::to_string(size) + ")";
}

}  // namespace

// ---------------------------------------------------------------------------
// FastArray

FastArray::FastArray(int capacity, SiteId site, SupplyFill fill)
    : site_(site), fill_(fill) {
  if (capacity < 0) {
    throw ContractViolation("create: negative capacity " +
                            std::to_string(capacity));
  }
  storage_.assign(static_cast<size_t>(capacity), supply_value());
}

FastArray FastArray::calloc_create(int siz, SiteId site, SupplyFill fill) {
  if (siz < 0) {
    throw ContractViolation("calloc: negative size " + std::to_string(siz));
  }
  FastArray a(siz, site, fill);
  for (auto& cell : a.storage_) cell = CellValue::null();
  a.size_ = siz;
  return a;
}

CellValue FastArray::supply_value() const {
  return fill_ == SupplyFill::Zero ? CellValue::null() : CellValue::stale();
}

void FastArray::grow() {
  int new_capacity = capacity() == 0 ? 1 : capacity() * 2;
  storage_.resize(static_cast<size_t>(new_capacity), supply_value());
}

void FastArray::extend(CellValue obj) {
  if (size_ >= capacity()) grow();
  storage_[static_cast<size_t>(size_)] = obj;
  size_ += 1;
}

CellValue FastArray::read(int ind) const {
  if (ind < 0 || ind >= size_) throw ContractViolation(bad_index("read", ind, size_));
  return storage_[static_cast<size_t>(ind)];
}

void FastArray::write(int ind, CellValue obj) {
  if (ind < 0 || ind >= size_) throw ContractViolation(bad_index("write", ind, size_));
  storage_[static_cast<size_t>(ind)] = obj;
}

void FastArray::remove_last() {
  if (size_ == 0) throw ContractViolation("remove_last: array is empty");
  size_ -= 1;
  // The vacated cell joins the supply area. Its value is left alone unless
  // the fill mode asks for detectable or scannable supply.
  if (fill_ == SupplyFill::Poison) {
    storage_[static_cast<size_t>(size_)] = CellValue::stale();
  } else if (fill_ == SupplyFill::Zero) {
    storage_[static_cast<size_t>(size_)] = CellValue::null();
  }
}

// ---------------------------------------------------------------------------
// IndexedArray

IndexedArray::IndexedArray(int capacity, int lower, SiteId site,
                           SupplyFill fill)
    : base_(capacity, site, fill), lower_(lower) {}

CellValue IndexedArray::read(int ind) const {
  if (ind < lower_ || ind > upper()) {
    throw ContractViolation("read: index " + std::to_string(ind) +
                            " outside [" + std::to_string(lower_) + ", " +
                            std::to_string(upper()) + "]");
  }
  return base_.read(ind - lower_);
}

void IndexedArray::write(int ind, CellValue obj) {
  if (ind < lower_ || ind > upper()) {
    throw ContractViolation("write: index " + std::to_string(ind) +
                            " outside [" + std::to_string(lower_) + ", " +
                            std::to_string(upper()) + "]");
  }
  base_.write(ind - lower_, obj);
}

// ---------------------------------------------------------------------------
// RingArray

RingArray::RingArray(int capacity, int lower, SiteId site, SupplyFill fill)
    : lower_(lower), upper_(lower - 1), site_(site), fill_(fill) {
  if (capacity < 0) {
    throw ContractViolation("ring_create: negative capacity " +
                            std::to_string(capacity));
  }
  storage_.assign(static_cast<size_t>(capacity), supply_value());
}

CellValue RingArray::supply_value() const {
  return fill_ == SupplyFill::Zero ? CellValue::null() : CellValue::stale();
}

int RingArray::physical_index(int ind) const {
  if (ind < lower_ || ind > upper_) {
    throw ContractViolation("ring index " + std::to_string(ind) +
                            " outside [" + std::to_string(lower_) + ", " +
                            std::to_string(upper_) + "]");
  }
  int sidx = ind - lower_ + storage_lower_;
  if (sidx >= capacity()) sidx -= capacity();
  return sidx;
}

// Doubling the storage of a wrapped ring cannot keep the physical layout:
// the window is re-linearized into the front of the new buffer and
// storage_lower resets to 0.
void RingArray::grow() {
  int cnt = count();
  int new_capacity = capacity() == 0 ? 1 : capacity() * 2;
  std::vector<CellValue> next(static_cast<size_t>(new_capacity),
                              supply_value());
  for (int i = 0; i < cnt; ++i) {
    int sidx = storage_lower_ + i;
    if (sidx >= capacity()) sidx -= capacity();
    next[static_cast<size_t>(i)] = storage_[static_cast<size_t>(sidx)];
  }
  storage_ = std::move(next);
  storage_lower_ = 0;
}

void RingArray::extend(CellValue obj) {
  if (count() >= capacity()) grow();
  int sidx = upper_ + 1 - lower_ + storage_lower_;
  if (sidx >= capacity()) sidx -= capacity();
  storage_[static_cast<size_t>(sidx)] = obj;
  upper_ += 1;
}

void RingArray::prepend(CellValue obj) {
  if (count() >= capacity()) grow();
  storage_lower_ -= 1;
  if (storage_lower_ < 0) storage_lower_ += capacity();
  storage_[static_cast<size_t>(storage_lower_)] = obj;
  lower_ -= 1;
}

CellValue RingArray::read(int ind) const {
  return storage_[static_cast<size_t>(physical_index(ind))];
}

void RingArray::write(int ind, CellValue obj) {
  storage_[static_cast<size_t>(physical_index(ind))] = obj;
}

// ---------------------------------------------------------------------------
// ZeroedArray

ZeroedArray::ZeroedArray(int length, SiteId site) : site_(site) {
  if (length < 0) {
    throw ContractViolation("zeroed_create: negative length " +
                            std::to_string(length));
  }
  storage_.assign(static_cast<size_t>(length), CellValue::null());
}

void ZeroedArray::watermark_write(int index, CellValue obj) {
  if (index < 0 || index >= length()) {
    throw ContractViolation("watermark_write: index " + std::to_string(index) +
                            " outside [0, " + std::to_string(length()) + ")");
  }
  storage_[static_cast<size_t>(index)] = obj;
  if (index > gc_boundary_) gc_boundary_ = index;
}

CellValue ZeroedArray::read(int index) const {
  if (index < 0 || index >= length()) {
    throw ContractViolation("read: index " + std::to_string(index) +
                            " outside [0, " + std::to_string(length()) + ")");
  }
  return storage_[static_cast<size_t>(index)];
}

}  // namespace flexgc
