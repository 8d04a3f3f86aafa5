#include <random>
#include <vector>

#include "doctest.h"
#include "hierkraft/error.hpp"
#include "hierkraft/kraft.hpp"

using namespace hierkraft;

namespace {

std::vector<std::string> run(FreeList& fl, std::initializer_list<Exponent> es) {
  std::vector<std::string> out;
  for (auto e : es) out.push_back(fl.allocate(e).bits());
  return out;
}

}  // namespace

TEST_CASE("new allocator holds exactly its root") {
  FreeList unit(DyadicInterval::unit());
  CHECK(unit.entries() == std::vector{DyadicInterval::unit()});
  CHECK(unit.free_measure() == DyadicAmount::one());

  FreeList right(make_interval("1"));
  CHECK(right.entries() == std::vector{make_interval("1")});
  CHECK(right.free_measure() == DyadicAmount::pow2_neg(1));

  FreeList quarter(make_interval("01"));
  CHECK(quarter.free_measure() == DyadicAmount::pow2_neg(2));
}

TEST_CASE("allocate splits with left preference") {
  FreeList fl(DyadicInterval::unit());
  CHECK(fl.allocate(1).bits() == "0");
  CHECK(fl.entries() == std::vector{make_interval("1")});
  CHECK(fl.free_measure() == DyadicAmount::pow2_neg(1));

  FreeList a(DyadicInterval::unit());
  CHECK(run(a, {1, 2, 3}) == std::vector<std::string>{"0", "10", "110"});
  CHECK(a.free_measure() == DyadicAmount::pow2_neg(3));

  FreeList b(DyadicInterval::unit());
  CHECK(run(b, {2, 2, 1}) == std::vector<std::string>{"00", "01", "1"});
  CHECK(b.empty());
}

TEST_CASE("exact entry wins over splitting a larger one") {
  FreeList fl(DyadicInterval::unit());
  fl.allocate(2);  // leaves {"1", "01"}
  CHECK(fl.allocate(2).bits() == "01");
}

TEST_CASE("over-budget request raises and leaves the list intact") {
  FreeList fl(DyadicInterval::unit());
  fl.allocate(1);
  fl.allocate(1);
  CHECK_THROWS_AS(fl.allocate(1), KraftViolation);
  CHECK(fl.free_measure() == DyadicAmount::zero());

  FreeList g(DyadicInterval::unit());
  g.allocate(1);
  g.allocate(2);
  auto before = g.entries();
  CHECK_THROWS_AS(g.allocate(1), KraftViolation);
  CHECK(g.entries() == before);
}

TEST_CASE("insert rejects duplicate sizes") {
  FreeList fl;
  fl.insert(make_interval("0"));
  CHECK_THROWS_AS(fl.insert(make_interval("1")), std::logic_error);
}

TEST_CASE("random streams: success iff prefix sum fits, outputs disjoint, sizes distinct") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 1000; ++trial) {
    FreeList fl(DyadicInterval::unit());
    DyadicAmount used;
    std::vector<DyadicInterval> got;
    auto n = 1 + rng() % 40;
    for (std::uint64_t i = 0; i < n; ++i) {
      Exponent e = 1 + rng() % 8;
      bool fits = used + DyadicAmount::pow2_neg(e) <= DyadicAmount::one();
      if (!fits) {
        REQUIRE_THROWS_AS(fl.allocate(e), KraftViolation);
        break;
      }
      auto iv = fl.allocate(e);
      REQUIRE(iv.depth() == e);
      for (const auto& g : got) REQUIRE(g.disjoint(iv));
      got.push_back(iv);
      used += iv.measure();
      REQUIRE(fl.free_measure() == fl.recompute_measure());
      REQUIRE(fl.free_measure() + used == DyadicAmount::one());
      auto entries = fl.entries();
      for (std::size_t a = 0; a < entries.size(); ++a)
        for (std::size_t b = a + 1; b < entries.size(); ++b) {
          REQUIRE(entries[a].depth() != entries[b].depth());
          REQUIRE(entries[a].disjoint(entries[b]));
        }
    }
  }
}

TEST_CASE("identical request sequences give identical intervals") {
  std::vector<Exponent> es{3, 1, 4, 1, 5};
  FreeList a(DyadicInterval::unit()), b(DyadicInterval::unit());
  for (auto e : es) {
    try {
      auto x = a.allocate(e);
      CHECK(x == b.allocate(e));
    } catch (const KraftViolation&) {
      CHECK_THROWS_AS(b.allocate(e), KraftViolation);
    }
  }
}
