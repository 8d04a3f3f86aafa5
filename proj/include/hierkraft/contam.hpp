#pragma once

#include <cstdint>
#include <vector>

#include "hierkraft/dyadic.hpp"

namespace hierkraft {

/*
 * Growing union of aligned intervals, stored as a binary trie over bit
 * strings. A trie node is "covered" when its whole interval is contaminated.
 *
 * Canonical form: no covered node has a covered ancestor, and two covered
 * siblings are always merged into their covered parent. With that form an
 * interval is fully contaminated iff some node on its root path is covered.
 */
class ContaminationSet {
 public:
  ContaminationSet();

  void contaminate(const DyadicInterval& iv);
  bool fully_contaminated(const DyadicInterval& iv) const;
  const DyadicAmount& measure() const noexcept { return measure_; }

  // Covered nodes in lexicographic order; the canonical cover.
  std::vector<DyadicInterval> covered() const;
  bool empty() const noexcept { return measure_.is_zero(); }

 private:
  static constexpr std::int32_t none = -1;

  struct TrieNode {
    std::int32_t child[2] = {none, none};
    bool covered = false;
  };

  std::int32_t make_node();
  DyadicAmount covered_measure_below(std::int32_t n, std::uint64_t depth) const;

  std::vector<TrieNode> nodes_;
  std::vector<std::int32_t> spare_;
  DyadicAmount measure_;
};

// Insurance bookkeeping: every interval found fully contaminated at the moment
// it was bought is burned here and its price refunded to the buyer.
class InsuranceLedger {
 public:
  void record_burn(DyadicInterval iv);

  const std::vector<DyadicInterval>& burned() const noexcept { return burned_; }
  const DyadicAmount& payouts() const noexcept { return payouts_; }

 private:
  std::vector<DyadicInterval> burned_;
  DyadicAmount payouts_;
};

}  // namespace hierkraft
