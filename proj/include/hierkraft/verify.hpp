#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "hierkraft/hier.hpp"
#include "hierkraft/report.hpp"
#include "hierkraft/stream.hpp"

namespace hierkraft {

class CapacityError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/*
 * Structural invariants that can be re-derived from a stream and its event log
 * alone, without looking inside any allocator state: seq order, minimum sizes,
 * father containment, brother disjointness, allocation-time cleanliness and
 * burn bookkeeping. Contamination coverage is decided from the raw list of
 * contaminated intervals, not from the trie the allocator uses.
 */
class LogChecker {
 public:
  LogChecker();

  void on_contaminate(const DyadicInterval& iv);
  void on_request(NodeId id, NodeId parent, Exponent label);
  void on_event(const Event& ev, AuditReport& report);

  bool covered(std::string_view bits) const;
  DyadicAmount contamination_measure() const;
  const DyadicAmount& endowments() const noexcept { return endowments_; }
  const DyadicAmount& payouts() const noexcept { return payouts_; }
  std::size_t allocs_seen(NodeId id) const;

 private:
  struct Info {
    NodeId father = root_id;
    Exponent label = 0;
    std::set<std::string, std::less<>> owned;
  };

  std::map<NodeId, Info> nodes_;
  std::map<NodeId, std::map<std::string, NodeId, std::less<>>> sons_space_;
  std::set<std::string, std::less<>> contam_;
  std::set<std::string, std::less<>> burned_;
  DyadicAmount endowments_;
  DyadicAmount payouts_;
  std::uint64_t last_seq_ = 0;
};

// Per-request audit: log-derived checks for the new events plus ledger and
// free-list checks along the path from the new node to the root. Global cash
// totals are kept from money deltas, so each step costs O(path length).
class StepAuditor {
 public:
  void on_contaminate(const DyadicInterval& iv) { log_.on_contaminate(iv); }
  AuditReport after_request(const RequestTree& tree, NodeId id, NodeId parent, Exponent label,
                            std::size_t log_begin);

 private:
  LogChecker log_;
  std::map<NodeId, DyadicAmount> money_;
  DyadicAmount money_sum_;
};

// Seeded generator: std::mt19937_64 with hand-rolled bounded draws so the
// output is identical on every standard library.
class StreamRng {
 public:
  explicit StreamRng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  // Uniform in [0, n), n > 0.
  std::uint64_t below(std::uint64_t n);
  // Uniform in [lo, hi].
  std::uint64_t between(std::uint64_t lo, std::uint64_t hi) { return lo + below(hi - lo + 1); }
  // Uniform double in [0, 1) with 53 random bits.
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

struct StreamSpec {
  std::uint64_t seed = 1;
  std::uint32_t node_budget = 10;
  Exponent max_label = 16;
  double hierarchy_probability = 0.5;
  double contamination_fraction = 0.0;
  // When false, labels are drawn without regard to the unit budget.
  bool enforce_budget = true;
};

// Deterministic random stream. With enforce_budget, endowments plus the sum of
// contaminated measures never exceed 1; the generator stops early once no
// label up to max_label fits the remaining budget.
RequestStream random_stream(const StreamSpec& spec);

struct BruteRequest {
  std::size_t parent;  // 0 = root, otherwise 1-based index of an earlier request
  Exponent label;
};

// Exhaustive search for one aligned interval of measure exactly 2^-label per
// request with father containment and brother disjointness.
// Capacity: <= 6 requests, labels <= 4, depth cap <= 6.
bool brute_force_feasible(std::span<const BruteRequest> requests, Exponent depth_cap);

// Runs labels through the plain free list and through a flat request tree;
// true iff both give the same interval sequence (and fail at the same index).
bool kraft_chaitin_equiv(std::span<const Exponent> labels);

// Replays stream and log in lockstep, re-deriving all structural invariants
// from the log, then re-runs the allocator with per-step and final audits and
// requires a bit-identical log.
AuditReport replay_audit(const RequestStream& stream, const EventLog& log);

struct FuzzOptions {
  std::uint64_t seed = 1;
  std::uint32_t nodes = 50;
  Exponent max_label = 16;
  double contam_frac = 0.0;
  std::uint32_t iters = 100;
  double hier_prob = -1.0;  // < 0: cycle through flat and hierarchical mixes
};

struct FuzzOutcome {
  std::uint32_t passed = 0;
  std::uint32_t total = 0;
  bool all_passed() const { return passed == total; }
  std::string summary;
  // First failure, for triage.
  std::uint32_t failing_iter = 0;
  std::string failing_stream;
  std::string failing_log;
  std::string failing_report;
};

FuzzOutcome run_fuzz(const FuzzOptions& options);

}  // namespace hierkraft
