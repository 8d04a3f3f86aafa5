#include "hierkraft/kraft.hpp"

#include <stdexcept>
#include <string>

#include "hierkraft/error.hpp"

namespace hierkraft {

FreeList::FreeList(DyadicInterval root) { insert(std::move(root)); }

bool FreeList::can_serve(Exponent e) const {
  return !entries_.empty() && entries_.begin()->first <= e;
}

DyadicInterval FreeList::allocate(Exponent e) {
  auto it = entries_.find(e);
  if (it == entries_.end()) {
    // Smallest entry strictly larger than 2^-e: greatest exponent below e.
    it = entries_.lower_bound(e);
    if (it == entries_.begin()) {
      throw KraftViolation("no free interval of measure >= 2^-" + std::to_string(e) +
                           " (free " + free_measure_.to_string() + ")");
    }
    --it;
  }
  DyadicInterval piece = std::move(it->second);
  entries_.erase(it);
  free_measure_ -= piece.measure();

  while (piece.depth() < e) {
    auto [l, r] = piece.split();
    insert(std::move(r));
    piece = std::move(l);
  }
  return piece;
}

void FreeList::insert(DyadicInterval iv) {
  auto e = iv.depth();
  auto [it, fresh] = entries_.try_emplace(e, std::move(iv));
  if (!fresh) {
    throw std::logic_error("free list already holds an interval of size 2^-" + std::to_string(e));
  }
  free_measure_ += it->second.measure();
}

DyadicAmount FreeList::recompute_measure() const {
  DyadicAmount sum;
  for (const auto& [e, iv] : entries_) sum += iv.measure();
  return sum;
}

std::vector<DyadicInterval> FreeList::entries() const {
  std::vector<DyadicInterval> out;
  out.reserve(entries_.size());
  for (const auto& [e, iv] : entries_) out.push_back(iv);
  return out;
}

}  // namespace hierkraft
