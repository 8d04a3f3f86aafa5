#include "hierkraft/contam.hpp"

#include <functional>
#include <string>

namespace hierkraft {

ContaminationSet::ContaminationSet() { nodes_.emplace_back(); }

std::int32_t ContaminationSet::make_node() {
  if (!spare_.empty()) {
    auto n = spare_.back();
    spare_.pop_back();
    nodes_[n] = TrieNode{};
    return n;
  }
  nodes_.emplace_back();
  return static_cast<std::int32_t>(nodes_.size() - 1);
}

DyadicAmount ContaminationSet::covered_measure_below(std::int32_t n, std::uint64_t depth) const {
  if (n == none) return {};
  if (nodes_[n].covered) return DyadicAmount::pow2_neg(depth);
  return covered_measure_below(nodes_[n].child[0], depth + 1) +
         covered_measure_below(nodes_[n].child[1], depth + 1);
}

void ContaminationSet::contaminate(const DyadicInterval& iv) {
  std::vector<std::int32_t> path{0};
  std::int32_t cur = 0;
  for (char c : iv.bits()) {
    if (nodes_[cur].covered) return;  // already inside a covered interval
    int b = c - '0';
    if (nodes_[cur].child[b] == none) {
      auto fresh = make_node();
      nodes_[cur].child[b] = fresh;
    }
    cur = nodes_[cur].child[b];
    path.push_back(cur);
  }
  if (nodes_[cur].covered) return;

  measure_ -= covered_measure_below(cur, iv.depth());
  measure_ += iv.measure();

  // Drop the now redundant subtree.
  std::function<void(std::int32_t)> release = [&](std::int32_t n) {
    if (n == none) return;
    release(nodes_[n].child[0]);
    release(nodes_[n].child[1]);
    spare_.push_back(n);
  };
  release(nodes_[cur].child[0]);
  release(nodes_[cur].child[1]);
  nodes_[cur] = TrieNode{};
  nodes_[cur].covered = true;

  // Merge covered siblings upward.
  for (auto i = path.size() - 1; i > 0; --i) {
    auto parent = path[i - 1];
    auto l = nodes_[parent].child[0];
    auto r = nodes_[parent].child[1];
    if (l == none || r == none || !nodes_[l].covered || !nodes_[r].covered) break;
    spare_.push_back(l);
    spare_.push_back(r);
    nodes_[parent] = TrieNode{};
    nodes_[parent].covered = true;
  }
}

bool ContaminationSet::fully_contaminated(const DyadicInterval& iv) const {
  std::int32_t cur = 0;
  if (nodes_[cur].covered) return true;
  for (char c : iv.bits()) {
    cur = nodes_[cur].child[c - '0'];
    if (cur == none) return false;
    if (nodes_[cur].covered) return true;
  }
  return false;
}

std::vector<DyadicInterval> ContaminationSet::covered() const {
  std::vector<DyadicInterval> out;
  std::string bits;
  std::function<void(std::int32_t)> walk = [&](std::int32_t n) {
    if (n == none) return;
    if (nodes_[n].covered) {
      out.emplace_back(bits);
      return;
    }
    for (int b = 0; b < 2; ++b) {
      bits.push_back(static_cast<char>('0' + b));
      walk(nodes_[n].child[b]);
      bits.pop_back();
    }
  };
  walk(0);
  return out;
}

void InsuranceLedger::record_burn(DyadicInterval iv) {
  payouts_ += iv.measure();
  burned_.push_back(std::move(iv));
}

}  // namespace hierkraft
