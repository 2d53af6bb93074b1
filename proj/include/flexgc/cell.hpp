// Cell values stored in array slots and object fields: a heap reference,
// the distinguished null value, an opaque scalar, or the stale sentinel
// that models an uninitialized supply-area slot.
#pragma once

#include <cstdint>
#include <functional>

namespace flexgc {

// Index of a slot in the modeled heap. Slots hold either an object or an
// array; the heap decides. Identity comparisons are slot comparisons.
struct ObjRef {
  uint32_t slot = 0;

  friend bool operator==(ObjRef a, ObjRef b) { return a.slot == b.slot; }
  friend bool operator!=(ObjRef a, ObjRef b) { return a.slot != b.slot; }
  friend bool operator<(ObjRef a, ObjRef b) { return a.slot < b.slot; }
};

// Static allocation-site identifier carried by every array instance.
using SiteId = int32_t;
constexpr SiteId kNoSite = -1;

class CellValue {
 public:
  enum class Kind : uint8_t { Null, Ref, Scalar, Stale };

  CellValue() : kind_(Kind::Null), bits_(0) {}

  static CellValue null() { return CellValue(); }
  static CellValue ref(ObjRef r) { return CellValue(Kind::Ref, r.slot); }
  static CellValue scalar(int64_t v) {
    return CellValue(Kind::Scalar, static_cast<uint64_t>(v));
  }
  static CellValue stale() { return CellValue(Kind::Stale, 0xdeadbeef); }

  Kind kind() const { return kind_; }
  bool is_null() const { return kind_ == Kind::Null; }
  bool is_ref() const { return kind_ == Kind::Ref; }
  bool is_scalar() const { return kind_ == Kind::Scalar; }
  bool is_stale() const { return kind_ == Kind::Stale; }

  ObjRef as_ref() const { return ObjRef{static_cast<uint32_t>(bits_)}; }
  int64_t as_scalar() const { return static_cast<int64_t>(bits_); }

  friend bool operator==(const CellValue& a, const CellValue& b) {
    return a.kind_ == b.kind_ && a.bits_ == b.bits_;
  }
  friend bool operator!=(const CellValue& a, const CellValue& b) {
    return !(a == b);
  }

 private:
  CellValue(Kind k, uint64_t bits) : kind_(k), bits_(bits) {}

  Kind kind_;
  uint64_t bits_;
};

}  // namespace flexgc

template <>
struct std::hash<flexgc::ObjRef> {
  size_t operator()(flexgc::ObjRef r) const noexcept {
    return std::hash<uint32_t>()(r.slot);
  }
};
