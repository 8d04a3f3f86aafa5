#pragma once

#include <map>
#include <vector>

#include "hierkraft/dyadic.hpp"

namespace hierkraft {

/*
 * Online Kraft-Chaitin allocator.
 *
 * Free space is a set of pairwise disjoint aligned intervals with pairwise
 * distinct sizes, keyed by size exponent. A request for 2^-e takes the exact
 * entry if there is one; otherwise the smallest larger entry is split
 * repeatedly, always descending into the left half, and every right half goes
 * back on the list. Minimality of the split entry keeps sizes distinct.
 */
class FreeList {
 public:
  FreeList() = default;
  explicit FreeList(DyadicInterval root);

  // Throws KraftViolation when no entry of measure >= 2^-e exists; the list
  // is left untouched in that case.
  DyadicInterval allocate(Exponent e);

  // True iff allocate(e) would succeed.
  bool can_serve(Exponent e) const;

  // Adds a free interval. Its size must not already be present.
  void insert(DyadicInterval iv);

  const DyadicAmount& free_measure() const noexcept { return free_measure_; }
  DyadicAmount recompute_measure() const;

  // Entries from largest to smallest.
  std::vector<DyadicInterval> entries() const;
  const std::map<Exponent, DyadicInterval>& table() const noexcept { return entries_; }
  bool empty() const noexcept { return entries_.empty(); }
  std::size_t size() const noexcept { return entries_.size(); }

 private:
  std::map<Exponent, DyadicInterval> entries_;
  DyadicAmount free_measure_;
};

}  // namespace hierkraft
