#include "doctest.h"
#include "hierkraft/codec.hpp"
#include "hierkraft/error.hpp"

using namespace hierkraft;

namespace {

using Raw = std::vector<std::pair<std::string, Exponent>>;

Raw twice_length(unsigned depth) {
  Raw raw;
  for (unsigned len = 1; len <= depth; ++len)
    for (unsigned v = 0; v < (1u << len); ++v) {
      std::string x;
      for (unsigned i = 0; i < len; ++i) x.push_back((v >> (len - 1 - i)) & 1 ? '1' : '0');
      raw.emplace_back(x, 2 * len);
    }
  return raw;
}

Raw depth_two_table() {
  return {{"0", 2}, {"1", 2}, {"00", 3}, {"01", 3}, {"10", 3}, {"11", 3}};
}

std::vector<std::string> code_bits(const CodeBook& cb, const std::string& x) {
  std::vector<std::string> out;
  for (const auto& c : cb.codewords(x)) out.push_back(c.bits.bits());
  return out;
}

using V = std::vector<std::string>;

}  // namespace

TEST_CASE("length functions") {
  auto k = load_length_function(twice_length(6), 6);
  CHECK(k.kraft_sum == DyadicAmount(63, 6));
  CHECK(k.labels.size() == 126);

  auto t = load_length_function(depth_two_table(), 2);
  CHECK(t.kraft_sum == DyadicAmount::one());

  auto d = load_length_function({{"01", 3}}, 4);
  CHECK(d.labels.empty());
  CHECK(d.dropped == V{"01"});

  auto cut = load_length_function(twice_length(3), 2);
  CHECK(cut.labels.size() == 6);
  CHECK(cut.at("010") == std::nullopt);
  CHECK(cut.at("01") == 4);

  try {
    load_length_function({{"0", 1}, {"1", 1}, {"00", 1}}, 2);
    FAIL("expected InvalidLengthFunction");
  } catch (const InvalidLengthFunction& e) {
    CHECK(e.sum() == DyadicAmount(3, 1));
  }
  CHECK_THROWS_AS(load_length_function({{"0", 2}, {"0", 3}}, 2), InputError);
  CHECK_THROWS_AS(load_length_function({{"0", 0}}, 2), InputError);
  CHECK_THROWS_AS(load_length_function({{"2", 1}}, 2), InputError);
}

TEST_CASE("codebooks built in breadth-first order") {
  auto cb = build_codebook(load_length_function(depth_two_table(), 2));
  CHECK(code_bits(cb, "0") == V{"00"});
  CHECK(code_bits(cb, "1") == V{"01"});
  CHECK(code_bits(cb, "00") == V{"000"});
  CHECK(code_bits(cb, "01") == V{"001"});
  CHECK(code_bits(cb, "10") == V{"010"});
  CHECK(code_bits(cb, "11") == V{"011"});

  auto small = build_codebook(load_length_function(twice_length(1), 1));
  CHECK(code_bits(small, "0") == V{"00"});
  CHECK(code_bits(small, "1") == V{"01"});

  std::vector<ContaminationEvent> c{{make_interval("00"), 0}};
  auto dirty = build_codebook(load_length_function(twice_length(1), 1), c);
  CHECK(code_bits(dirty, "0") == V{"01"});
  CHECK(code_bits(dirty, "1") == V{"10"});
  REQUIRE_FALSE(dirty.events().empty());
  CHECK(dirty.events().front().kind == Event::Kind::burn);

  std::vector<ContaminationEvent> big{{make_interval("0"), 0}};
  CHECK_THROWS_AS(build_codebook(load_length_function(depth_two_table(), 2), big), InputError);
}

TEST_CASE("encode") {
  auto cb = build_codebook(load_length_function(depth_two_table(), 2));
  auto r = encode(cb, "10");
  CHECK(r.beta == "010");
  REQUIRE(r.chain.size() == 2);
  CHECK(r.chain[0].bits() == "01");
  CHECK(r.chain[1].bits() == "010");

  auto z = encode(cb, "0");
  CHECK(z.beta == "00");
  REQUIRE(z.chain.size() == 1);
  CHECK(z.chain[0].bits() == "00");

  auto e = encode(cb, "");
  CHECK(e.beta.empty());
  CHECK(e.chain.empty());

  CHECK_THROWS_AS(encode(cb, "101"), EncodeFailure);
}

TEST_CASE("decode") {
  auto cb = build_codebook(load_length_function(depth_two_table(), 2));
  auto r = decode(cb, "010");
  CHECK(r.out == "10");
  CHECK(r.use_profile == std::vector<std::size_t>{2, 3});

  auto e = decode(cb, "");
  CHECK(e.out.empty());
  CHECK(e.use_profile.empty());

  auto n = decode(cb, "11");
  CHECK(n.out.empty());
  CHECK(n.use_profile.empty());
  CHECK(n.bits_read == 1);
}

TEST_CASE("use bound reports") {
  auto cb = build_codebook(load_length_function(depth_two_table(), 2));
  auto d = decode(cb, encode(cb, "10").beta);
  auto rep = check_use_bound(cb.length_function(), "10", d.use_profile);
  CHECK(rep.passed());
  CHECK(rep.to_text() == "PASS n=1 use=2 bound=2\nPASS n=2 use=3 bound=3\n");

  auto vac = check_use_bound(cb.length_function(), "", {});
  CHECK(vac.passed());
  CHECK(vac.lines.empty());

  std::vector<std::size_t> too_much{3, 3};
  CHECK_FALSE(check_use_bound(cb.length_function(), "10", too_much).passed());
  std::vector<std::size_t> short_profile{2};
  CHECK_FALSE(check_use_bound(cb.length_function(), "10", short_profile).passed());
}

TEST_CASE("twice-length codes at depth 4 stay within 2n") {
  auto cb = build_codebook(load_length_function(twice_length(4), 4));
  for (unsigned v = 0; v < 16; ++v) {
    std::string alpha;
    for (int i = 3; i >= 0; --i) alpha.push_back((v >> i) & 1 ? '1' : '0');
    auto d = decode(cb, encode(cb, alpha).beta);
    REQUIRE(d.out.substr(0, 4) == alpha);
    for (std::size_t n = 1; n <= 4; ++n) REQUIRE(d.use_profile[n - 1] <= 2 * n);
    REQUIRE(check_use_bound(cb.length_function(), alpha, d.use_profile).passed());
  }
}

TEST_CASE("codeword lists stay within 2^K and size bounds") {
  auto cb = build_codebook(load_length_function(twice_length(6), 6));
  for (const auto& [x, label] : cb.length_function().labels) {
    const auto& cws = cb.codewords(x);
    REQUIRE_FALSE(cws.empty());
    REQUIRE(cws.size() <= (std::size_t{1} << label));
    for (std::size_t i = 0; i < cws.size(); ++i) {
      REQUIRE(cws[i].bits.depth() <= label);
      for (std::size_t j = i + 1; j < cws.size(); ++j) REQUIRE(cws[i].bits.disjoint(cws[j].bits));
    }
  }
  auto k = load_length_function({{"0", 1}}, 1);
  std::vector<Enumerated> three{{"0", make_interval("0"), 1},
                                {"0", make_interval("1"), 2},
                                {"0", make_interval("11"), 3}};
  CHECK_THROWS_AS(CodeBook(k, three), InputError);
  std::vector<Enumerated> tiny{{"0", make_interval("00"), 1}};
  CHECK_THROWS_AS(CodeBook(k, tiny), InputError);
}

TEST_CASE("codebook files") {
  auto table = parse_k_table("# comment\nk 0 2\nk 1 2\nk 00 3\nk 01 3\nk 10 3\nk 11 3\n", 62);
  CHECK(table == depth_two_table());
  CHECK_THROWS_AS(parse_k_table("k 0 70\n", 62), InputError);
  CHECK_THROWS_AS(parse_k_table("k 0\n", 62), InputError);
  CHECK_THROWS_AS(parse_k_table("k - 2\n", 62), InputError);

  auto c = parse_contamination("contam 00\ncontam 1 3\n");
  REQUIRE(c.size() == 2);
  CHECK(c[0].interval.bits() == "00");
  CHECK(c[0].after_requests == 0);
  CHECK(c[1].after_requests == 3);

  auto cb = build_codebook(load_length_function(table, 2));
  auto text = write_codebook(cb);
  auto back = parse_codebook(text);
  CHECK(write_codebook(back) == text);
  CHECK(decode(back, "010").out == "10");
  CHECK(encode(back, "11").beta == encode(cb, "11").beta);
}
