#include "hierkraft/hier.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>
#include <string_view>

#include "hierkraft/error.hpp"

namespace hierkraft {

namespace {

std::string node_name(NodeId id) { return id == root_id ? "root" : "node " + std::to_string(id); }

}  // namespace

RequestTree::RequestTree() {
  Node root;
  root.free = FreeList(DyadicInterval::unit());
  root.owned.push_back(DyadicInterval::unit());
  nodes_.push_back(std::move(root));
}

bool RequestTree::contains(NodeId id) const {
  auto it = std::lower_bound(nodes_.begin(), nodes_.end(), id,
                             [](const Node& n, NodeId v) { return n.id < v; });
  return it != nodes_.end() && it->id == id;
}

std::size_t RequestTree::index_of(NodeId id) const {
  auto it = std::lower_bound(nodes_.begin(), nodes_.end(), id,
                             [](const Node& n, NodeId v) { return n.id < v; });
  if (it == nodes_.end() || it->id != id) throw InputError("unknown node " + std::to_string(id));
  return static_cast<std::size_t>(it - nodes_.begin());
}

const Node& RequestTree::node(NodeId id) const { return nodes_[index_of(id)]; }

void RequestTree::append(Event ev) {
  ev.seq = next_seq_++;
  log_.push_back(std::move(ev));
}

Allocation RequestTree::add_request(NodeId father, Exponent label) {
  return add_request(last_id() + 1, father, label);
}

Allocation RequestTree::add_request(NodeId id, NodeId father, Exponent label) {
  if (failed_) throw std::logic_error("request tree is in failed state after a Kraft violation");
  if (label < 1) throw InputError("label must be >= 1");
  if (id <= last_id()) {
    throw InputError("node id " + std::to_string(id) + " does not exceed previous id " +
                     std::to_string(last_id()));
  }
  auto father_index = index_of(father);

  Node v;
  v.id = id;
  v.label = label;
  v.father = father;
  v.money = DyadicAmount::pow2_neg(label);
  endowments_ += v.money;
  nodes_.push_back(std::move(v));
  nodes_[father_index].children.push_back(id);

  try {
    auto x = buy_clean(nodes_.size() - 1, label);
    nodes_.back().free.insert(x);
    return {id, std::move(x)};
  } catch (const KraftViolation&) {
    Event ev;
    ev.kind = Event::Kind::error;
    ev.error_kind = "kraft_violation";
    append(std::move(ev));
    failed_ = true;
    throw;
  }
}

DyadicInterval RequestTree::sell(std::size_t seller, Exponent e) {
  Node& v = nodes_[seller];
  const auto price = DyadicAmount::pow2_neg(e);

  if (v.free.can_serve(e)) {  // exact or split
    v.money += price;
    return v.free.allocate(e);
  }
  if (seller == 0) {
    throw KraftViolation("root cannot serve 2^-" + std::to_string(e) + " (free " +
                         v.free.free_measure().to_string() + ")");
  }
  v.money += price;
  if (e <= v.label) {  // pass-through, never enters v.free
    return buy_clean(seller, e);
  }
  // restock: every free entry is smaller than 2^-e, so w becomes the only
  // candidate for the split and sizes stay distinct
  auto w = buy_clean(seller, v.label);
  v.free.insert(std::move(w));
  return v.free.allocate(e);
}

DyadicInterval RequestTree::buy_clean(std::size_t buyer, Exponent e) {
  const auto father = index_of(nodes_[buyer].father);
  const auto price = DyadicAmount::pow2_neg(e);
  for (;;) {
    nodes_[buyer].money -= price;
    auto x = sell(father, e);
    if (contamination_.fully_contaminated(x)) {
      Event ev;
      ev.kind = Event::Kind::burn;
      ev.interval = x;
      append(std::move(ev));
      insurance_.record_burn(std::move(x));
      nodes_[buyer].money += price;
      continue;
    }
    nodes_[buyer].owned.push_back(x);
    Event ev;
    ev.kind = Event::Kind::alloc;
    ev.node = nodes_[buyer].id;
    ev.interval = x;
    append(std::move(ev));
    return x;
  }
}

void RequestTree::set_money_for_testing(NodeId id, DyadicAmount money) {
  nodes_[index_of(id)].money = std::move(money);
}

AuditReport RequestTree::audit() const {
  AuditReport r;
  r.record("ledger", true);
  r.record("min_size", true);
  r.record("father_containment", true);
  r.record("sibling_disjointness", true);
  r.record("root_balance", true);
  r.record("cash_conservation", true);
  r.record("free_lists", true);
  r.record("insurance", true);

  DyadicAmount node_money;
  for (const Node& v : nodes_) {
    auto total = v.free.free_measure() + v.money;
    r.check("ledger", total == DyadicAmount::pow2_neg(v.label), [&] {
      return node_name(v.id) + ": free " + v.free.free_measure().to_string() + " + money " +
             v.money.to_string() + " != 2^-" + std::to_string(v.label);
    });
    if (v.id != root_id) node_money += v.money;

    // free list: cache, keys, disjointness, inside owned space
    r.check("free_lists", v.free.recompute_measure() == v.free.free_measure(),
            [&] { return node_name(v.id) + ": cached free measure is stale"; });
    auto entries = v.free.entries();
    for (const auto& [e, iv] : v.free.table()) {
      r.check("free_lists", iv.depth() == e, [&] {
        return node_name(v.id) + ": entry " + iv.field() + " filed under exponent " +
               std::to_string(e);
      });
      bool inside = std::any_of(v.owned.begin(), v.owned.end(),
                                [&](const DyadicInterval& o) { return o.contains(iv); });
      r.check("free_lists", inside, [&] {
        return node_name(v.id) + ": free entry " + iv.field() + " outside owned space";
      });
    }
    for (std::size_t i = 0; i < entries.size(); ++i)
      for (std::size_t j = i + 1; j < entries.size(); ++j)
        r.check("free_lists", entries[i].disjoint(entries[j]), [&] {
          return node_name(v.id) + ": free entries " + entries[i].field() + " and " +
                 entries[j].field() + " overlap";
        });

    if (v.id == root_id) continue;

    r.check("min_size", !v.owned.empty() && v.owned.front().depth() == v.label, [&] {
      return node_name(v.id) + ": first interval is not of size 2^-" + std::to_string(v.label);
    });
    for (const auto& iv : v.owned)
      r.check("min_size", iv.depth() <= v.label, [&] {
        return node_name(v.id) + ": interval " + iv.field() + " smaller than 2^-" +
               std::to_string(v.label);
      });

    const auto& fowned = nodes_[index_of(v.father)].owned;
    std::set<std::string, std::less<>> father_set;
    for (const auto& f : fowned) father_set.insert(f.bits());
    for (const auto& iv : v.owned) {
      bool inside = false;
      std::string_view bits = iv.bits();
      for (std::size_t d = 0; d <= bits.size() && !inside; ++d)
        inside = father_set.find(bits.substr(0, d)) != father_set.end();
      r.check("father_containment", inside, [&] {
        return node_name(v.id) + ": interval " + iv.field() + " outside " + node_name(v.father);
      });
    }
  }

  // Brothers: any comparable pair shows up as a prefix lookup from the longer
  // interval; the same lookup also catches overlaps inside one node's list.
  for (const Node& f : nodes_) {
    std::map<std::string, NodeId, std::less<>> space;
    for (NodeId c : f.children) {
      for (const auto& iv : nodes_[index_of(c)].owned) {
        auto [it, fresh] = space.emplace(iv.bits(), c);
        r.check("sibling_disjointness", fresh, [&] {
          return "interval " + iv.field() + " held by " + node_name(it->second) + " and " +
                 node_name(c);
        });
      }
    }
    for (const auto& [bits, owner] : space) {
      std::string_view sv = bits;
      for (std::size_t d = 0; d < sv.size(); ++d) {
        auto it = space.find(sv.substr(0, d));
        if (it == space.end()) continue;
        r.check("sibling_disjointness", false, [&] {
          return node_name(it->second) + " interval " + DyadicInterval(it->first).field() +
                 " overlaps " + node_name(owner) + " interval " + bits;
        });
      }
    }
  }

  const Node& root = nodes_.front();
  r.check("root_balance", root.free.free_measure() + root.money == DyadicAmount::one(), [&] {
    return "root free " + root.free.free_measure().to_string() + " + revenue " +
           root.money.to_string() + " != 1";
  });

  auto lhs = node_money + root.money;
  auto rhs = endowments_ + insurance_.payouts();
  r.check("cash_conservation", lhs == rhs, [&] {
    return "node money + revenue = " + lhs.to_string() +
           " but endowments + payouts = " + rhs.to_string();
  });

  const auto& burned = insurance_.burned();
  DyadicAmount burned_sum;
  for (const auto& b : burned) {
    burned_sum += b.measure();
    r.check("insurance", contamination_.fully_contaminated(b),
            [&] { return "burned " + b.field() + " is not contaminated"; });
  }
  // in sorted order an interval containing another sits right before one of
  // the intervals it contains
  auto sorted = burned;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i + 1 < sorted.size(); ++i)
    r.check("insurance", sorted[i].disjoint(sorted[i + 1]), [&] {
      return "burned " + sorted[i].field() + " and " + sorted[i + 1].field() + " overlap";
    });
  r.check("insurance", burned_sum == insurance_.payouts(), [&] {
    return "payouts " + insurance_.payouts().to_string() + " != burned total " +
           burned_sum.to_string();
  });
  r.check("insurance", insurance_.payouts() <= contamination_.measure(), [&] {
    return "payouts " + insurance_.payouts().to_string() + " exceed contamination " +
           contamination_.measure().to_string();
  });
  return r;
}

}  // namespace hierkraft
