#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hierkraft/dyadic.hpp"
#include "hierkraft/hier.hpp"

namespace hierkraft {

class InvalidLengthFunction : public std::invalid_argument {
 public:
  explicit InvalidLengthFunction(DyadicAmount sum)
      : std::invalid_argument("length function Kraft sum " + sum.to_string() + " exceeds 1"),
        sum_(std::move(sum)) {}

  const DyadicAmount& sum() const noexcept { return sum_; }

 private:
  DyadicAmount sum_;
};

class EncodeFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Shorter strings first, then lexicographic.
struct BreadthFirst {
  using is_transparent = void;
  bool operator()(std::string_view a, std::string_view b) const noexcept {
    return a.size() != b.size() ? a.size() < b.size() : a < b;
  }
};

// Length bounds K(x) on a prefix-closed set of nonempty strings of length
// at most depth, with Kraft sum at most 1.
struct LengthFunction {
  std::map<std::string, Exponent, BreadthFirst> labels;
  unsigned depth = 0;
  DyadicAmount kraft_sum;
  std::vector<std::string> dropped;  // removed by the prefix/depth restriction

  std::optional<Exponent> at(std::string_view x) const;
};

// Restricts raw (string, label) pairs to the maximal prefix-closed subtree of
// depth <= depth and validates the Kraft sum (InvalidLengthFunction if > 1).
// Throws InputError for malformed strings, duplicates, labels < 1, depth < 1.
LengthFunction load_length_function(const std::vector<std::pair<std::string, Exponent>>& raw,
                                    unsigned depth);

// Contamination applied once `after_requests` codebook requests were issued.
struct ContaminationEvent {
  DyadicInterval interval;
  std::size_t after_requests = 0;
};

struct Codeword {
  DyadicInterval bits;
  std::uint64_t seq = 0;
};

// One codeword in enumeration (allocation) order.
struct Enumerated {
  std::string target;
  DyadicInterval codeword;
  std::uint64_t seq = 0;
};

class CodeBook {
 public:
  CodeBook() = default;
  // Rebuilds a codebook from its enumeration, e.g. after reading it from a file.
  CodeBook(LengthFunction k, std::vector<Enumerated> enumeration);

  const LengthFunction& length_function() const noexcept { return k_; }
  // Codewords of x in allocation order; empty when x has none.
  const std::vector<Codeword>& codewords(std::string_view x) const;
  const std::vector<Enumerated>& enumeration() const noexcept { return enumeration_; }
  // Full allocation log; only present for freshly built codebooks.
  const EventLog& events() const noexcept { return events_; }

 private:
  friend CodeBook build_codebook(const LengthFunction&, std::span<const ContaminationEvent>);

  LengthFunction k_;
  std::map<std::string, std::vector<Codeword>, BreadthFirst> codes_;
  std::vector<Enumerated> enumeration_;
  EventLog events_;
};

// Issues one request per string in breadth-first order, each a son of its
// longest proper prefix, with label K(x). Contamination must keep
// Kraft sum + contaminated measure <= 1 (InputError otherwise).
CodeBook build_codebook(const LengthFunction& k,
                        std::span<const ContaminationEvent> contamination = {});

struct EncodeResult {
  std::string beta;
  std::vector<DyadicInterval> chain;  // codewords of alpha|1, ..., alpha|n
};

// Earliest codeword of alpha, with the chain of ancestor codewords below it.
EncodeResult encode(const CodeBook& cb, std::string_view alpha);

struct DecodeStep {
  enum class Kind { read, output };
  Kind kind;
  std::uint64_t events_seen;   // enumeration prefix visible at this step
  std::string out_before;
  std::string z_before;
  DyadicInterval codeword;     // read: the codeword that licensed it; output: the match
};

struct DecodeResult {
  std::string out;
  std::vector<std::size_t> use_profile;  // use_profile[n-1] = oracle bits read for bit n
  std::size_t bits_read = 0;
  std::vector<DecodeStep> trace;
};

// Oracle machine with delayed reads, replaying the enumeration in seq order.
DecodeResult decode(const CodeBook& cb, std::string_view beta);

struct UseBoundLine {
  std::size_t n = 0;
  std::optional<std::size_t> use;
  std::optional<Exponent> k;      // K(alpha|n)
  std::optional<Exponent> bound;  // min over n <= i <= |alpha| of K(alpha|i)
  bool passed = false;
};

struct UseBoundReport {
  std::vector<UseBoundLine> lines;
  bool passed() const;
  // "PASS n=1 use=2 bound=2" per line.
  std::string to_text() const;
};

UseBoundReport check_use_bound(const LengthFunction& k, std::string_view alpha,
                               std::span<const std::size_t> use_profile);

// File formats:
//   K table:        k <bits> <label>
//   contamination:  contam <bits> [<after_requests>]
//   codebook:       depth <d>, k lines, code <string> <bits> <seq>
std::vector<std::pair<std::string, Exponent>> parse_k_table(std::string_view text,
                                                            Exponent max_label);
std::vector<ContaminationEvent> parse_contamination(std::string_view text);
std::string write_codebook(const CodeBook& cb);
CodeBook parse_codebook(std::string_view text);

}  // namespace hierkraft
