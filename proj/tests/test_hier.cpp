#include <random>

#include "doctest.h"
#include "hierkraft/error.hpp"
#include "hierkraft/hier.hpp"
#include "hierkraft/verify.hpp"

using namespace hierkraft;

namespace {

std::vector<std::string> bits_of(const std::vector<DyadicInterval>& ivs) {
  std::vector<std::string> out;
  for (const auto& iv : ivs) out.push_back(iv.bits());
  return out;
}

std::vector<std::string> free_bits(const Node& v) { return bits_of(v.free.entries()); }

void check_ledgers(const RequestTree& t) {
  for (const auto& v : t.nodes())
    CHECK(v.free.free_measure() + v.money == DyadicAmount::pow2_neg(v.label));
}

}  // namespace

TEST_CASE("new tree") {
  RequestTree t;
  CHECK(t.node(root_id).free.free_measure() == DyadicAmount::one());
  CHECK(t.revenue() == DyadicAmount::zero());
  CHECK(t.log().empty());
  CHECK(t.audit().passed());
  CHECK(bits_of(t.owned(root_id)) == std::vector<std::string>{""});
}

TEST_CASE("son of the root, then a pass-through grandson") {
  RequestTree t;
  auto a = t.add_request(root_id, 2);
  CHECK(a.id == 1);
  CHECK(a.interval.bits() == "00");
  CHECK(free_bits(t.node(root_id)) == std::vector<std::string>{"1", "01"});
  CHECK(t.revenue() == DyadicAmount::pow2_neg(2));

  auto b = t.add_request(1, 1);
  CHECK(b.id == 2);
  CHECK(b.interval.bits() == "1");
  CHECK(bits_of(t.owned(1)) == std::vector<std::string>{"00", "1"});
  CHECK(bits_of(t.owned(2)) == std::vector<std::string>{"1"});
  check_ledgers(t);
  CHECK(t.audit().passed());

  // node 1 buys "1" and hands it to node 2; both transfers are logged
  REQUIRE(t.log().size() == 3);
  CHECK(t.log()[1].node == 1);
  CHECK(t.log()[2].node == 2);
  CHECK(t.log()[2].interval.bits() == "1");
}

TEST_CASE("five sons overflow their father") {
  RequestTree t;
  t.add_request(root_id, 2);
  std::vector<std::string> got;
  for (int i = 0; i < 5; ++i) got.push_back(t.add_request(1, 4).interval.bits());
  CHECK(got == std::vector<std::string>{"0000", "0001", "0010", "0011", "0100"});
  CHECK(bits_of(t.owned(1)) == std::vector<std::string>{"00", "01"});
  const auto& a = t.node(1);
  CHECK(a.free.free_measure() == DyadicAmount(3, 4));
  CHECK(a.money == DyadicAmount::pow2_neg(4));
  CHECK(free_bits(a) == std::vector<std::string>{"011", "0101"});
  CHECK(t.endowments() == DyadicAmount(9, 4));
  CHECK(t.revenue() == DyadicAmount::pow2_neg(1));
  check_ledgers(t);
  auto rep = t.audit();
  CHECK(rep.passed());
  REQUIRE(rep.find("cash_conservation") != nullptr);
  CHECK(rep.find("cash_conservation")->passed);
}

TEST_CASE("exact-entry sale from the root") {
  RequestTree t;
  t.add_request(root_id, 1);
  CHECK(free_bits(t.node(root_id)) == std::vector<std::string>{"1"});
  auto b = t.add_request(root_id, 1);
  CHECK(b.interval.bits() == "1");
  CHECK(t.node(root_id).free.empty());
  CHECK(t.revenue() == DyadicAmount::one());
}

TEST_CASE("over-budget root raises and poisons the tree") {
  RequestTree t;
  t.add_request(root_id, 1);
  t.add_request(root_id, 1);
  CHECK_THROWS_AS(t.add_request(root_id, 1), KraftViolation);
  CHECK(t.failed());
  REQUIRE_FALSE(t.log().empty());
  CHECK(t.log().back().kind == Event::Kind::error);
  CHECK(t.log().back().error_kind == "kraft_violation");
  CHECK(t.log().back().seq == 3);
  CHECK_THROWS_AS(t.add_request(root_id, 3), std::logic_error);
}

TEST_CASE("request errors") {
  RequestTree t;
  CHECK_THROWS_AS(t.add_request(7, 1), InputError);
  CHECK_THROWS_AS(t.add_request(root_id, 0), InputError);
  t.add_request(5, root_id, 3);
  CHECK_THROWS_AS(t.add_request(5, root_id, 3), InputError);
  CHECK_THROWS_AS(t.node(4), InputError);
  CHECK(t.contains(5));
  CHECK_FALSE(t.contains(4));
  CHECK(t.owned(5).size() == 1);
  CHECK(t.owned(5).front().measure() == DyadicAmount::pow2_neg(3));
}

TEST_CASE("contaminated halves are burned and refunded") {
  RequestTree t;
  t.contaminate(make_interval("0"));
  auto a = t.add_request(root_id, 1);
  CHECK(a.interval.bits() == "1");
  CHECK(bits_of(t.owned(1)) == std::vector<std::string>{"1"});
  CHECK(t.revenue() == DyadicAmount::one());
  CHECK(t.payouts() == DyadicAmount::pow2_neg(1));
  CHECK(t.endowments() == DyadicAmount::pow2_neg(1));
  CHECK(t.node(root_id).free.free_measure() == DyadicAmount::zero());
  REQUIRE(t.log().size() == 2);
  CHECK(t.log()[0].kind == Event::Kind::burn);
  CHECK(t.log()[0].interval.bits() == "0");
  CHECK(t.audit().passed());

  RequestTree u;
  u.contaminate(make_interval("00"));
  CHECK(u.add_request(root_id, 2).interval.bits() == "01");
  CHECK(u.insurance().burned().size() == 1);
}

TEST_CASE("audit names the node whose ledger was corrupted") {
  RequestTree t;
  t.add_request(root_id, 2);
  t.add_request(1, 4);
  t.add_request(1, 3);
  t.set_money_for_testing(1, DyadicAmount::zero());
  auto rep = t.audit();
  CHECK_FALSE(rep.passed());
  auto* ledger = rep.find("ledger");
  REQUIRE(ledger != nullptr);
  CHECK_FALSE(ledger->passed);
  CHECK(ledger->counterexample.find("node 1") != std::string::npos);
  CHECK(rep.find("min_size")->passed);
}

TEST_CASE("without contamination every purchase is a plain sale") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    RequestTree t;
    DyadicAmount budget;
    for (int i = 0; i < 60; ++i) {
      Exponent l = 1 + rng() % 12;
      if (budget + DyadicAmount::pow2_neg(l) > DyadicAmount::one()) continue;
      budget += DyadicAmount::pow2_neg(l);
      NodeId father = rng() % 2 ? rng() % (t.last_id() + 1) : root_id;
      t.add_request(father, l);
    }
    for (const auto& ev : t.log()) REQUIRE(ev.kind == Event::Kind::alloc);
    REQUIRE(t.payouts().is_zero());
    REQUIRE(t.audit().passed());
  }
}

TEST_CASE("random hierarchical trees under budget never violate and always audit clean") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    RequestTree t;
    DyadicAmount budget;
    for (int i = 0; i < 80; ++i) {
      Exponent l = 1 + rng() % 14;
      bool contam = rng() % 5 == 0;
      if (contam) {
        std::string bits;
        auto len = 2 + rng() % 8;
        for (std::uint64_t k = 0; k < len; ++k) bits.push_back(rng() & 1 ? '1' : '0');
        auto iv = make_interval(bits);
        // the contaminated measure counts against the budget in full
        if (budget + iv.measure() > DyadicAmount::one()) continue;
        budget += iv.measure();
        t.contaminate(iv);
        continue;
      }
      if (budget + DyadicAmount::pow2_neg(l) > DyadicAmount::one()) continue;
      budget += DyadicAmount::pow2_neg(l);
      NodeId father = rng() % (t.last_id() + 1);
      REQUIRE_NOTHROW(t.add_request(father, l));
    }
    auto rep = t.audit();
    INFO(rep.to_text());
    REQUIRE(rep.passed());
    REQUIRE(t.payouts() <= t.contamination().measure());
  }
}
