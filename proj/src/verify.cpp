#include "hierkraft/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "hierkraft/error.hpp"
#include "hierkraft/kraft.hpp"

namespace hierkraft {

namespace {

bool starts_with(std::string_view s, std::string_view p) {
  return s.size() >= p.size() && s.substr(0, p.size()) == p;
}

// Some element of the prefix-free-or-not set is comparable with bits.
// Returns the first such element, or nullptr.
template <class Map>
const std::string* comparable_in(const Map& m, std::string_view bits) {
  for (std::size_t d = 0; d <= bits.size(); ++d) {
    auto it = m.find(bits.substr(0, d));
    if (it != m.end()) {
      if constexpr (requires { it->first; })
        return &it->first;
      else
        return &*it;
    }
  }
  auto it = m.lower_bound(bits);
  if (it != m.end()) {
    const std::string* s;
    if constexpr (requires { it->first; })
      s = &it->first;
    else
      s = &*it;
    if (starts_with(*s, bits)) return s;
  }
  return nullptr;
}

std::string field_of(std::string_view bits) {
  return bits.empty() ? std::string("-") : std::string(bits);
}

}  // namespace

// ---------------------------------------------------------------------------
// LogChecker

LogChecker::LogChecker() {
  Info root;
  root.owned.insert(std::string());
  nodes_.emplace(root_id, std::move(root));
}

void LogChecker::on_contaminate(const DyadicInterval& iv) { contam_.insert(iv.bits()); }

void LogChecker::on_request(NodeId id, NodeId parent, Exponent label) {
  Info info;
  info.father = parent;
  info.label = label;
  nodes_[id] = std::move(info);
  endowments_ += DyadicAmount::pow2_neg(label);
}

bool LogChecker::covered(std::string_view bits) const {
  for (std::size_t d = 0; d <= bits.size(); ++d)
    if (contam_.count(bits.substr(0, d))) return true;
  // Without a covering ancestor, both halves must be covered by intervals
  // strictly inside.
  auto it = contam_.upper_bound(bits);
  if (it == contam_.end() || !starts_with(*it, bits)) return false;
  std::string b(bits);
  return covered(b + '0') && covered(b + '1');
}

DyadicAmount LogChecker::contamination_measure() const {
  // Minimal elements are pairwise disjoint and cover the union.
  DyadicAmount m;
  const std::string* last_min = nullptr;
  for (const auto& s : contam_) {
    if (last_min && starts_with(s, *last_min)) continue;
    m += DyadicAmount::pow2_neg(s.size());
    last_min = &s;
  }
  return m;
}

std::size_t LogChecker::allocs_seen(NodeId id) const {
  auto it = nodes_.find(id);
  return it == nodes_.end() ? 0 : it->second.owned.size();
}

void LogChecker::on_event(const Event& ev, AuditReport& r) {
  const std::string at = " (seq " + std::to_string(ev.seq) + ")";
  r.check("seq_order", ev.seq > last_seq_,
          [&] { return "seq " + std::to_string(ev.seq) + " after " + std::to_string(last_seq_); });
  last_seq_ = ev.seq;

  if (ev.kind == Event::Kind::burn) {
    const auto& bits = ev.interval.bits();
    r.check("burn_contaminated", covered(bits),
            [&] { return "burned " + ev.interval.field() + " was not fully contaminated" + at; });
    const std::string* clash = comparable_in(burned_, bits);
    r.check("burn_disjoint", clash == nullptr, [&] {
      return "burned " + ev.interval.field() + " overlaps earlier burn " +
             (clash ? field_of(*clash) : std::string()) + at;
    });
    burned_.insert(bits);
    payouts_ += ev.interval.measure();
    return;
  }
  if (ev.kind == Event::Kind::error) return;

  auto it = nodes_.find(ev.node);
  if (it == nodes_.end() || ev.node == root_id) {
    r.check("log_consistency", false,
            [&] { return "alloc for unknown node " + std::to_string(ev.node) + at; });
    return;
  }
  Info& v = it->second;
  const auto& bits = ev.interval.bits();
  const std::string who = "node " + std::to_string(ev.node);

  if (v.owned.empty()) {
    r.check("min_size", ev.interval.depth() == v.label, [&] {
      return who + " first interval " + ev.interval.field() + " is not of size 2^-" +
             std::to_string(v.label) + at;
    });
  }
  r.check("min_size", ev.interval.depth() <= v.label, [&] {
    return who + " interval " + ev.interval.field() + " smaller than 2^-" +
           std::to_string(v.label) + at;
  });

  const auto& fowned = nodes_.at(v.father).owned;
  bool inside = false;
  for (std::size_t d = 0; d <= bits.size() && !inside; ++d)
    inside = fowned.count(std::string_view(bits).substr(0, d)) > 0;
  r.check("father_containment", inside, [&] {
    return who + " interval " + ev.interval.field() + " not inside any earlier interval of " +
           (v.father == root_id ? std::string("root") : "node " + std::to_string(v.father)) + at;
  });

  auto& space = sons_space_[v.father];
  for (std::size_t d = 0; d <= bits.size(); ++d) {
    auto s = space.find(std::string_view(bits).substr(0, d));
    if (s != space.end()) {
      r.check("sibling_disjointness", false, [&] {
        return who + " interval " + ev.interval.field() + " meets " + field_of(s->first) +
               " of node " + std::to_string(s->second) + at;
      });
    }
  }
  for (auto s = space.upper_bound(bits); s != space.end() && starts_with(s->first, bits); ++s) {
    r.check("sibling_disjointness", false, [&] {
      return who + " interval " + ev.interval.field() + " meets " + field_of(s->first) +
             " of node " + std::to_string(s->second) + at;
    });
  }
  space.emplace(bits, ev.node);

  r.check("clean_at_allocation", !covered(bits),
          [&] { return who + " received fully contaminated " + ev.interval.field() + at; });
  v.owned.insert(bits);
}

// ---------------------------------------------------------------------------
// StepAuditor

AuditReport StepAuditor::after_request(const RequestTree& tree, NodeId id, NodeId parent,
                                       Exponent label, std::size_t log_begin) {
  AuditReport r;
  log_.on_request(id, parent, label);
  const auto& log = tree.log();
  for (auto i = log_begin; i < log.size(); ++i) log_.on_event(log[i], r);

  bool closed = log.size() > log_begin && log.back().kind == Event::Kind::alloc &&
                log.back().node == id && log.back().interval.depth() == label;
  r.check("log_consistency", closed,
          [&] { return "request " + std::to_string(id) + " did not end with its own allocation"; });

  // Walk the path to the root.
  NodeId cur = id;
  for (;;) {
    const Node& v = tree.node(cur);
    const std::string who = cur == root_id ? std::string("root") : "node " + std::to_string(cur);
    r.check("ledger", v.free.free_measure() + v.money == DyadicAmount::pow2_neg(v.label), [&] {
      return who + ": free " + v.free.free_measure().to_string() + " + money " +
             v.money.to_string() + " != 2^-" + std::to_string(v.label);
    });
    r.check("free_lists", v.free.recompute_measure() == v.free.free_measure(),
            [&] { return who + ": cached free measure is stale"; });
    auto entries = v.free.entries();
    for (std::size_t i = 0; i < entries.size(); ++i) {
      r.check("free_lists",
              std::any_of(v.owned.begin(), v.owned.end(),
                          [&](const DyadicInterval& o) { return o.contains(entries[i]); }),
              [&] { return who + ": free entry " + entries[i].field() + " outside owned space"; });
      for (std::size_t j = i + 1; j < entries.size(); ++j) {
        r.check("free_lists",
                entries[i].depth() != entries[j].depth() && entries[i].disjoint(entries[j]), [&] {
                  return who + ": free entries " + entries[i].field() + " and " +
                         entries[j].field() + " collide";
                });
      }
    }
    if (cur != root_id) {
      auto [it, fresh] = money_.try_emplace(cur);
      money_sum_ -= it->second;
      it->second = v.money;
      money_sum_ += v.money;
    }
    if (cur == root_id) break;
    cur = v.father;
  }

  const Node& root = tree.node(root_id);
  r.check("root_balance", root.free.free_measure() + tree.revenue() == DyadicAmount::one(), [&] {
    return "root free " + root.free.free_measure().to_string() + " + revenue " +
           tree.revenue().to_string() + " != 1";
  });
  auto lhs = money_sum_ + tree.revenue();
  auto rhs = log_.endowments() + log_.payouts();
  r.check("cash_conservation", lhs == rhs, [&] {
    return "node money + revenue = " + lhs.to_string() +
           " but endowments + payouts = " + rhs.to_string() + " after request " +
           std::to_string(id);
  });
  r.check("cash_conservation",
          tree.endowments() == log_.endowments() && tree.payouts() == log_.payouts(),
          [&] { return "tree totals disagree with log-derived endowments/payouts"; });
  r.check("insurance", log_.payouts() <= log_.contamination_measure(), [&] {
    return "payouts " + log_.payouts().to_string() + " exceed contamination measure";
  });
  return r;
}

// ---------------------------------------------------------------------------
// Generators

std::uint64_t StreamRng::below(std::uint64_t n) {
  // Rejection keeps the draw exactly uniform.
  const std::uint64_t limit =
      std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x;
  do x = next();
  while (x >= limit);
  return x % n;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

namespace {

// Smallest e in [1, cap] with 2^-e <= budget, or cap + 1 if none.
Exponent smallest_fitting(const DyadicAmount& budget, Exponent cap) {
  for (Exponent e = 1; e <= cap; ++e)
    if (DyadicAmount::pow2_neg(e) <= budget) return e;
  return cap + 1;
}

std::string format_double(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

RequestStream random_stream(const StreamSpec& spec) {
  RequestStream s;
  s.header.push_back("hierkraft stream generator=mt19937_64 seed=" + std::to_string(spec.seed) +
                     " nodes=" + std::to_string(spec.node_budget) +
                     " max_label=" + std::to_string(spec.max_label) +
                     " hier=" + format_double(spec.hierarchy_probability) +
                     " contam=" + format_double(spec.contamination_fraction) +
                     (spec.enforce_budget ? "" : " unbounded"));
  StreamRng rng(spec.seed);

  double frac = std::clamp(spec.contamination_fraction, 0.0, 1.0);
  constexpr int frac_bits = 32;
  DyadicAmount contam_left(
      DyadicAmount::Integer(static_cast<std::uint64_t>(std::floor(std::ldexp(frac, frac_bits)))),
      frac_bits);
  DyadicAmount endow_left = DyadicAmount::one() - contam_left;

  auto draw_label = [&](Exponent lo) -> Exponent {
    const Exponent hi = spec.max_label;
    if (rng.below(2) == 0) return static_cast<Exponent>(rng.between(lo, hi));
    Exponent deep = hi > 3 ? std::max(lo, hi - 3) : lo;
    return static_cast<Exponent>(rng.between(deep, hi));
  };

  for (NodeId id = 1; id <= spec.node_budget; ++id) {
    if (!contam_left.is_zero() && rng.unit() < 0.25) {
      Exponent lo = smallest_fitting(contam_left, spec.max_label);
      if (lo <= spec.max_label) {
        auto depth = draw_label(lo);
        std::string bits;
        for (Exponent i = 0; i < depth; ++i) bits.push_back(rng.below(2) ? '1' : '0');
        s.directives.push_back(RequestStream::contaminate(DyadicInterval(bits)));
        contam_left -= DyadicAmount::pow2_neg(depth);
      }
    }
    NodeId parent = root_id;
    if (id > 1 && rng.unit() < spec.hierarchy_probability) parent = rng.between(1, id - 1);

    Exponent label;
    if (spec.enforce_budget) {
      Exponent lo = smallest_fitting(endow_left, spec.max_label);
      if (lo > spec.max_label) break;
      label = draw_label(lo);
      endow_left -= DyadicAmount::pow2_neg(label);
    } else {
      label = static_cast<Exponent>(rng.between(1, spec.max_label));
    }
    s.directives.push_back(RequestStream::request(id, parent, label));
  }
  return s;
}

// ---------------------------------------------------------------------------
// Oracles

bool brute_force_feasible(std::span<const BruteRequest> requests, Exponent depth_cap) {
  if (requests.size() > 6 || depth_cap > 6)
    throw CapacityError("brute force capacity is 6 requests and depth cap 6");
  for (std::size_t i = 0; i < requests.size(); ++i) {
    if (requests[i].label > 4) throw CapacityError("brute force capacity is label 4");
    if (requests[i].label < 1) throw InputError("label must be >= 1");
    if (requests[i].parent > i) throw InputError("parent must be an earlier request");
  }
  for (const auto& q : requests)
    if (q.label > depth_cap) return false;

  struct Slot {
    unsigned len = 0;
    unsigned value = 0;
  };
  std::vector<Slot> assigned(requests.size() + 1);  // [0] is the root

  auto comparable = [](Slot a, Slot b) {
    unsigned m = std::min(a.len, b.len);
    return (a.value >> (a.len - m)) == (b.value >> (b.len - m));
  };

  std::function<bool(std::size_t)> place = [&](std::size_t i) -> bool {
    if (i > requests.size()) return true;
    const auto& q = requests[i - 1];
    Slot father = assigned[q.parent];
    if (q.label < father.len) return false;
    unsigned shift = q.label - father.len;
    unsigned first = father.value << shift;
    unsigned count = 1u << shift;
    for (unsigned v = first; v < first + count; ++v) {
      Slot s{q.label, v};
      bool ok = true;
      for (std::size_t j = 1; j < i && ok; ++j)
        if (requests[j - 1].parent == q.parent && comparable(assigned[j], s)) ok = false;
      if (!ok) continue;
      assigned[i] = s;
      if (place(i + 1)) return true;
    }
    return false;
  };
  return place(1);
}

bool kraft_chaitin_equiv(std::span<const Exponent> labels) {
  FreeList plain(DyadicInterval::unit());
  RequestTree flat;
  for (auto l : labels) {
    bool plain_ok = true, flat_ok = true;
    DyadicInterval a, b;
    try {
      a = plain.allocate(l);
    } catch (const KraftViolation&) {
      plain_ok = false;
    }
    try {
      b = flat.add_request(root_id, l).interval;
    } catch (const KraftViolation&) {
      flat_ok = false;
    }
    if (plain_ok != flat_ok) return false;
    if (!plain_ok) return true;
    if (a != b) return false;
  }
  return true;
}

AuditReport replay_audit(const RequestStream& stream, const EventLog& log) {
  AuditReport r;
  r.record("log_consistency", true);
  LogChecker checker;
  std::size_t pos = 0;
  bool stopped = false;
  for (const auto& d : stream.directives) {
    if (stopped) break;
    if (d.kind == StreamDirective::Kind::contaminate) {
      checker.on_contaminate(d.interval);
      continue;
    }
    checker.on_request(d.id, d.parent, d.label);
    bool closed = false;
    while (pos < log.size() && !closed) {
      const Event& ev = log[pos++];
      checker.on_event(ev, r);
      if (ev.kind == Event::Kind::error) {
        stopped = true;
        break;
      }
      closed = ev.kind == Event::Kind::alloc && ev.node == d.id;
    }
    if (!closed && !stopped) {
      r.check("log_consistency", false,
              [&] { return "log ends before request " + std::to_string(d.id) + " is served"; });
      stopped = true;
    }
  }
  if (pos < log.size()) {
    r.check("log_consistency", false, [&] {
      return std::to_string(log.size() - pos) + " trailing events after the stream is exhausted";
    });
  }
  r.check("insurance", checker.payouts() <= checker.contamination_measure(), [&] {
    return "payouts " + checker.payouts().to_string() + " exceed contamination measure " +
           checker.contamination_measure().to_string();
  });

  RunOptions opts;
  opts.audit = true;
  opts.audit_each_step = true;
  auto fresh = run_stream(stream, opts);
  r.merge(fresh.report);
  const auto& again = fresh.tree.log();
  std::string diff;
  for (std::size_t i = 0; i < std::max(again.size(), log.size()) && diff.empty(); ++i) {
    if (i >= again.size() || i >= log.size() || !(again[i] == log[i])) {
      diff = "first difference at event " + std::to_string(i + 1) + ": given '" +
             (i < log.size() ? format_event(log[i]) : std::string("<end>")) + "', rerun '" +
             (i < again.size() ? format_event(again[i]) : std::string("<end>")) + "'";
    }
  }
  r.check("deterministic_replay", diff.empty(), [&] { return diff; });
  return r;
}

// ---------------------------------------------------------------------------
// Fuzzing

FuzzOutcome run_fuzz(const FuzzOptions& options) {
  static constexpr double mixes[] = {0.0, 0.25, 0.5, 0.9};
  FuzzOutcome out;
  for (std::uint32_t i = 0; i < options.iters; ++i) {
    StreamSpec spec;
    spec.seed = splitmix64(options.seed * 0x100000001b3ULL + i);
    spec.node_budget = options.nodes;
    spec.max_label = options.max_label;
    spec.contamination_fraction = options.contam_frac;
    spec.hierarchy_probability = options.hier_prob >= 0 ? options.hier_prob : mixes[i % 4];
    auto stream = random_stream(spec);
    auto run = run_stream(stream);

    auto report = replay_audit(stream, run.tree.log());
    report.check("no_kraft_violation", !run.kraft_violation, [&] { return run.violation_message; });

    DyadicAmount budget = run.tree.endowments() + run.tree.contamination().measure();
    report.check("budget", budget <= DyadicAmount::one(),
                 [&] { return "endowments + contamination = " + budget.to_string(); });

    bool flat = std::all_of(stream.directives.begin(), stream.directives.end(), [](const auto& d) {
      return d.kind != StreamDirective::Kind::request || d.parent == root_id;
    });
    bool clean =
        std::none_of(stream.directives.begin(), stream.directives.end(),
                     [](const auto& d) { return d.kind == StreamDirective::Kind::contaminate; });
    if (flat && clean) {
      std::vector<Exponent> labels;
      for (const auto& d : stream.directives) labels.push_back(d.label);
      report.check("kraft_chaitin_equiv", kraft_chaitin_equiv(labels),
                   [&] { return "flat tree and plain free list disagree"; });
    }

    ++out.total;
    if (report.passed()) {
      ++out.passed;
    } else if (out.failing_stream.empty()) {
      out.failing_iter = i;
      out.failing_stream = write_stream(stream);
      out.failing_log = write_event_log(run.tree.log());
      out.failing_report = report.to_text();
    }
  }
  out.summary =
      std::to_string(out.passed) + "/" + std::to_string(out.total) +
      (out.all_passed() ? " PASS" : " FAIL first_failure=" + std::to_string(out.failing_iter));
  return out;
}

}  // namespace hierkraft
