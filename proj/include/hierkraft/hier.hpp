#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hierkraft/contam.hpp"
#include "hierkraft/dyadic.hpp"
#include "hierkraft/kraft.hpp"
#include "hierkraft/report.hpp"

namespace hierkraft {

using NodeId = std::uint64_t;
inline constexpr NodeId root_id = 0;

struct Event {
  enum class Kind { alloc, burn, error };

  Kind kind = Kind::alloc;
  std::uint64_t seq = 0;
  NodeId node = root_id;      // alloc only
  DyadicInterval interval;    // alloc and burn
  std::string error_kind;     // error only

  friend bool operator==(const Event&, const Event&) = default;
};

using EventLog = std::vector<Event>;

struct Node {
  NodeId id = root_id;
  Exponent label = 0;
  NodeId father = root_id;
  FreeList free;                       // inventory for resale to sons
  DyadicAmount money;
  std::vector<DyadicInterval> owned;   // every interval bought from the father
  std::vector<NodeId> children;
};

struct Allocation {
  NodeId id;
  DyadicInterval interval;
};

/*
 * Hierarchical allocator over a growing request tree.
 *
 * Every node buys aligned intervals from its father at price = measure and
 * resells pieces to its sons. A node serves a son's request for 2^-e by the
 * first case that applies:
 *   exact      an entry of size 2^-e is free
 *   split      a larger entry is free; split it with left preference
 *   pass       e <= label: buy 2^-e from the father and hand it straight on
 *   restock    e >  label: buy 2^-label from the father, split, keep the rest
 * The root has only the first two cases and raises KraftViolation otherwise.
 *
 * Money is tracked exactly. At every quiescent point each node satisfies
 * free_measure + money = 2^-label, and the root's money is its revenue.
 *
 * Every purchase from a father goes through the contamination check: an
 * interval that is fully contaminated when bought is burned, the buyer is
 * refunded from the insurance ledger and buys again.
 *
 * After a KraftViolation the tree is marked failed and rejects further
 * requests; an error event closes the log.
 */
class RequestTree {
 public:
  RequestTree();

  // New son of `father` with the next free id.
  Allocation add_request(NodeId father, Exponent label);
  // New node with an explicit id, which must exceed every existing id.
  Allocation add_request(NodeId id, NodeId father, Exponent label);

  void contaminate(const DyadicInterval& iv) { contamination_.contaminate(iv); }

  bool contains(NodeId id) const;
  // Throws InputError for unknown ids.
  const Node& node(NodeId id) const;
  const std::vector<DyadicInterval>& owned(NodeId id) const { return node(id).owned; }
  std::span<const Node> nodes() const noexcept { return nodes_; }
  NodeId last_id() const noexcept { return nodes_.back().id; }

  const DyadicAmount& revenue() const noexcept { return nodes_.front().money; }
  const DyadicAmount& endowments() const noexcept { return endowments_; }
  const DyadicAmount& payouts() const noexcept { return insurance_.payouts(); }
  const ContaminationSet& contamination() const noexcept { return contamination_; }
  const InsuranceLedger& insurance() const noexcept { return insurance_; }
  const EventLog& log() const noexcept { return log_; }
  bool failed() const noexcept { return failed_; }

  // Full invariant check; see audit check names in hier.cpp.
  AuditReport audit() const;

  // Fault injection for audit tests.
  void set_money_for_testing(NodeId id, DyadicAmount money);

 private:
  std::size_t index_of(NodeId id) const;
  DyadicInterval sell(std::size_t seller, Exponent e);
  DyadicInterval buy_clean(std::size_t buyer, Exponent e);
  void append(Event ev);

  std::vector<Node> nodes_;
  DyadicAmount endowments_;
  ContaminationSet contamination_;
  InsuranceLedger insurance_;
  EventLog log_;
  std::uint64_t next_seq_ = 1;
  bool failed_ = false;
};

}  // namespace hierkraft
