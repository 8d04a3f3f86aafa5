#include <random>
#include <set>

#include "doctest.h"
#include "hierkraft/contam.hpp"

using namespace hierkraft;

namespace {

std::vector<std::string> cover_bits(const ContaminationSet& c) {
  std::vector<std::string> out;
  for (const auto& iv : c.covered()) out.push_back(iv.bits());
  return out;
}

// Reference: a point set at fixed resolution. Each bit string of length `res`
// stands for one cell.
struct CellSet {
  unsigned res;
  std::set<std::string> cells;

  void add(const std::string& bits) {
    auto free_len = res - bits.size();
    for (std::uint64_t k = 0; k < (1ull << free_len); ++k) {
      std::string c = bits;
      for (unsigned i = 0; i < free_len; ++i) c.push_back((k >> (free_len - 1 - i)) & 1 ? '1' : '0');
      cells.insert(c);
    }
  }
  bool full(const std::string& bits) const {
    CellSet probe{res, {}};
    probe.add(bits);
    for (const auto& c : probe.cells)
      if (!cells.count(c)) return false;
    return true;
  }
};

}  // namespace

TEST_CASE("contaminate and measure") {
  ContaminationSet c;
  CHECK(c.measure() == DyadicAmount::zero());
  CHECK(c.empty());
  c.contaminate(make_interval("0"));
  CHECK(c.measure() == DyadicAmount::pow2_neg(1));

  ContaminationSet m;
  m.contaminate(make_interval("00"));
  m.contaminate(make_interval("01"));
  CHECK(cover_bits(m) == std::vector<std::string>{"0"});
  CHECK(m.measure() == DyadicAmount::pow2_neg(1));

  ContaminationSet s;
  s.contaminate(make_interval("0"));
  s.contaminate(make_interval("011"));
  CHECK(s.measure() == DyadicAmount::pow2_neg(1));
  CHECK(cover_bits(s) == std::vector<std::string>{"0"});

  ContaminationSet t;
  t.contaminate(make_interval("0"));
  t.contaminate(make_interval("10"));
  CHECK(t.measure() == DyadicAmount(3, 2));

  ContaminationSet u;
  u.contaminate(make_interval("0"));
  u.contaminate(make_interval("1"));
  CHECK(u.measure() == DyadicAmount::one());
  CHECK(cover_bits(u) == std::vector<std::string>{""});
}

TEST_CASE("fully_contaminated queries") {
  ContaminationSet c;
  c.contaminate(make_interval("0"));
  CHECK(c.fully_contaminated(make_interval("01")));
  CHECK(c.fully_contaminated(make_interval("0")));
  CHECK_FALSE(c.fully_contaminated(make_interval("")));
  CHECK_FALSE(c.fully_contaminated(make_interval("1")));

  ContaminationSet m;
  m.contaminate(make_interval("00"));
  m.contaminate(make_interval("01"));
  CHECK(m.fully_contaminated(make_interval("0")));
}

TEST_CASE("a subtree swallowed by a larger interval is released") {
  ContaminationSet c;
  c.contaminate(make_interval("0101"));
  c.contaminate(make_interval("0110"));
  c.contaminate(make_interval("0"));
  CHECK(cover_bits(c) == std::vector<std::string>{"0"});
  c.contaminate(make_interval("111"));
  c.contaminate(make_interval("110"));
  c.contaminate(make_interval("10"));
  CHECK(cover_bits(c) == std::vector<std::string>{""});
  CHECK(c.measure() == DyadicAmount::one());
}

TEST_CASE("trie agrees with a cell-level reference on random unions") {
  std::mt19937_64 rng(17);
  const unsigned res = 7;
  for (int trial = 0; trial < 300; ++trial) {
    ContaminationSet c;
    CellSet ref{res, {}};
    auto n = 1 + rng() % 12;
    for (std::uint64_t i = 0; i < n; ++i) {
      std::string bits;
      auto len = 1 + rng() % res;
      for (std::uint64_t k = 0; k < len; ++k) bits.push_back(rng() & 1 ? '1' : '0');
      c.contaminate(make_interval(bits));
      ref.add(bits);
      REQUIRE(c.measure() == DyadicAmount(ref.cells.size(), res));
    }
    // canonical cover: pairwise disjoint, no two siblings both covered
    auto cov = c.covered();
    std::set<std::string> cov_set;
    for (const auto& iv : cov) cov_set.insert(iv.bits());
    for (std::size_t a = 0; a < cov.size(); ++a) {
      for (std::size_t b = a + 1; b < cov.size(); ++b) REQUIRE(cov[a].disjoint(cov[b]));
      const auto& bits = cov[a].bits();
      if (!bits.empty()) {
        std::string sib = bits;
        sib.back() = sib.back() == '0' ? '1' : '0';
        REQUIRE_FALSE(cov_set.count(sib));
      }
    }
    for (int q = 0; q < 40; ++q) {
      std::string bits;
      auto len = rng() % (res + 1);
      for (std::uint64_t k = 0; k < len; ++k) bits.push_back(rng() & 1 ? '1' : '0');
      REQUIRE(c.fully_contaminated(make_interval(bits)) == ref.full(bits));
    }
  }
}

TEST_CASE("insurance ledger sums burned measures") {
  InsuranceLedger l;
  l.record_burn(make_interval("0"));
  l.record_burn(make_interval("110"));
  CHECK(l.burned().size() == 2);
  CHECK(l.payouts() == DyadicAmount(5, 3));
}
