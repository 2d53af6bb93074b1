// Type sets are the unit of all flow facts: a set of class identities,
// array allocation sites, and the distinguished null member. Null is an
// ordinary member, so "can this expression be null" is plain set membership.
#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "flexgc/cell.hpp"

namespace flexgc {

// Members are packed into one integer: null is -1, class c is 2c, array
// site s is 2s + 1. Class and site ids must be non-negative.
using Member = int32_t;

constexpr Member kNullMember = -1;

inline Member class_member(int32_t class_id) { return class_id * 2; }
inline Member site_member(SiteId site) { return site * 2 + 1; }

inline bool member_is_null(Member m) { return m == kNullMember; }
inline bool member_is_class(Member m) { return m >= 0 && m % 2 == 0; }
inline bool member_is_site(Member m) { return m >= 0 && m % 2 == 1; }
inline int32_t member_class_id(Member m) { return m / 2; }
inline SiteId member_site_id(Member m) { return m / 2; }

// Sorted small-vector set. Insertions report growth so fixpoint loops can
// tell when anything changed.
class TypeSet {
 public:
  TypeSet() = default;

  bool insert(Member m) {
    auto it = std::lower_bound(members_.begin(), members_.end(), m);
    if (it != members_.end() && *it == m) return false;
    members_.insert(it, m);
    return true;
  }

  bool merge(const TypeSet& other) {
    bool changed = false;
    for (Member m : other.members_) changed |= insert(m);
    return changed;
  }

  bool contains(Member m) const {
    return std::binary_search(members_.begin(), members_.end(), m);
  }

  bool contains_null() const { return contains(kNullMember); }
  bool empty() const { return members_.empty(); }
  size_t size() const { return members_.size(); }

  const std::vector<Member>& members() const { return members_; }

  // True when every member of this set is also in other.
  bool subset_of(const TypeSet& other) const {
    for (Member m : members_)
      if (!other.contains(m)) return false;
    return true;
  }

  friend bool operator==(const TypeSet& a, const TypeSet& b) {
    return a.members_ == b.members_;
  }
  friend bool operator!=(const TypeSet& a, const TypeSet& b) {
    return !(a == b);
  }

 private:
  std::vector<Member> members_;
};

}  // namespace flexgc
