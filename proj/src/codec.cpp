#include "hierkraft/codec.hpp"

#include <algorithm>
#include <set>

#include "hierkraft/contam.hpp"
#include "hierkraft/error.hpp"
#include "hierkraft/stream.hpp"

namespace hierkraft {

std::optional<Exponent> LengthFunction::at(std::string_view x) const {
  auto it = labels.find(x);
  if (it == labels.end()) return std::nullopt;
  return it->second;
}

LengthFunction load_length_function(const std::vector<std::pair<std::string, Exponent>>& raw,
                                    unsigned depth) {
  if (depth < 1) throw InputError("depth must be >= 1");
  std::map<std::string, Exponent, BreadthFirst> table;
  for (const auto& [x, label] : raw) {
    if (x.empty() || !is_bit_string(x)) throw InputError("bad string '" + x + "' in length table");
    if (label < 1) throw InputError("label for '" + x + "' must be >= 1");
    if (!table.emplace(x, label).second) throw InputError("duplicate string '" + x + "'");
  }

  LengthFunction k;
  k.depth = depth;
  // Breadth-first order visits every prefix before its extensions.
  for (const auto& [x, label] : table) {
    bool keep = x.size() <= depth &&
                (x.size() == 1 || k.labels.count(std::string_view(x).substr(0, x.size() - 1)));
    if (!keep) {
      k.dropped.push_back(x);
      continue;
    }
    k.labels.emplace(x, label);
    k.kraft_sum += DyadicAmount::pow2_neg(label);
  }
  if (k.kraft_sum > DyadicAmount::one()) throw InvalidLengthFunction(k.kraft_sum);
  return k;
}

// ---------------------------------------------------------------------------

namespace {
const std::vector<Codeword> no_codewords;
}

CodeBook::CodeBook(LengthFunction k, std::vector<Enumerated> enumeration)
    : k_(std::move(k)), enumeration_(std::move(enumeration)) {
  std::stable_sort(enumeration_.begin(), enumeration_.end(),
                   [](const Enumerated& a, const Enumerated& b) { return a.seq < b.seq; });
  for (const auto& e : enumeration_) {
    if (!k_.labels.count(e.target)) {
      throw InputError("codeword for '" + e.target + "' which has no length bound");
    }
    const Exponent label = k_.labels.find(e.target)->second;
    if (e.codeword.depth() > label) {
      throw InputError("codeword " + e.codeword.field() + " of '" + e.target +
                       "' is smaller than 2^-" + std::to_string(label));
    }
    auto& list = codes_[e.target];
    list.push_back({e.codeword, e.seq});
    // disjoint intervals of measure >= 2^-label: at most 2^label of them
    if (label < 64 && list.size() > (std::uint64_t{1} << label)) {
      throw InputError("more than 2^" + std::to_string(label) + " codewords for '" + e.target + "'");
    }
  }
}

const std::vector<Codeword>& CodeBook::codewords(std::string_view x) const {
  auto it = codes_.find(x);
  return it == codes_.end() ? no_codewords : it->second;
}

CodeBook build_codebook(const LengthFunction& k, std::span<const ContaminationEvent> contamination) {
  if (!contamination.empty()) {
    ContaminationSet total;
    for (const auto& c : contamination) total.contaminate(c.interval);
    auto need = k.kraft_sum + total.measure();
    if (need > DyadicAmount::one()) {
      throw InputError("Kraft sum plus contamination is " + need.to_string() + ", exceeds 1");
    }
  }
  std::vector<ContaminationEvent> pending(contamination.begin(), contamination.end());
  std::stable_sort(pending.begin(), pending.end(), [](const auto& a, const auto& b) {
    return a.after_requests < b.after_requests;
  });

  RequestTree tree;
  std::map<std::string, NodeId, BreadthFirst> node_of;
  std::map<NodeId, std::string> target_of;
  std::size_t issued = 0, next_contam = 0;
  for (const auto& [x, label] : k.labels) {
    while (next_contam < pending.size() && pending[next_contam].after_requests <= issued)
      tree.contaminate(pending[next_contam++].interval);
    NodeId father = x.size() == 1 ? root_id : node_of.at(x.substr(0, x.size() - 1));
    auto a = tree.add_request(father, label);
    node_of.emplace(x, a.id);
    target_of.emplace(a.id, x);
    ++issued;
  }

  std::vector<Enumerated> enumeration;
  for (const auto& ev : tree.log()) {
    if (ev.kind != Event::Kind::alloc) continue;
    enumeration.push_back({target_of.at(ev.node), ev.interval, ev.seq});
  }
  CodeBook cb(k, std::move(enumeration));
  cb.events_ = tree.log();
  return cb;
}

// ---------------------------------------------------------------------------

EncodeResult encode(const CodeBook& cb, std::string_view alpha) {
  if (!is_bit_string(alpha)) throw InputError("alpha must be a bit string");
  EncodeResult r;
  if (alpha.empty()) return r;
  if (alpha.size() > cb.length_function().depth) {
    throw EncodeFailure("alpha is longer than the codebook depth " +
                        std::to_string(cb.length_function().depth));
  }
  for (std::size_t n = 1; n <= alpha.size(); ++n) {
    if (cb.codewords(alpha.substr(0, n)).empty()) {
      throw EncodeFailure("no codeword for prefix '" + std::string(alpha.substr(0, n)) + "'");
    }
  }

  const auto& top = cb.codewords(alpha);
  auto earliest = std::min_element(top.begin(), top.end(), [](const auto& a, const auto& b) {
    return a.seq < b.seq;
  });
  r.chain.resize(alpha.size());
  r.chain.back() = earliest->bits;
  for (std::size_t n = alpha.size() - 1; n >= 1; --n) {
    const auto& below = r.chain[n];
    const auto& cands = cb.codewords(alpha.substr(0, n));
    auto it = std::find_if(cands.begin(), cands.end(),
                           [&](const Codeword& c) { return c.bits.contains(below); });
    if (it == cands.end()) {
      throw EncodeFailure("codeword " + below.field() + " is not inside any codeword of '" +
                          std::string(alpha.substr(0, n)) + "'");
    }
    r.chain[n - 1] = it->bits;
  }
  r.beta = earliest->bits.bits();
  return r;
}

// ---------------------------------------------------------------------------

DecodeResult decode(const CodeBook& cb, std::string_view beta) {
  if (!is_bit_string(beta)) throw InputError("beta must be a bit string");
  DecodeResult r;
  std::map<std::string, std::vector<DyadicInterval>, BreadthFirst> seen;
  std::string z;

  auto settle = [&](std::uint64_t events_seen) {
    for (;;) {
      bool progressed = false;
      // OUTPUT has priority.
      for (char b : {'0', '1'}) {
        auto it = seen.find(r.out + b);
        if (it == seen.end()) continue;
        auto hit = std::find_if(it->second.begin(), it->second.end(),
                                [&](const DyadicInterval& c) { return c.bits() == z; });
        if (hit == it->second.end()) continue;
        r.trace.push_back({DecodeStep::Kind::output, events_seen, r.out, z, *hit});
        r.out.push_back(b);
        r.use_profile.push_back(z.size());
        progressed = true;
        break;
      }
      if (progressed) continue;

      // READ only when some relevant codeword properly extends z.
      if (r.bits_read < beta.size()) {
        for (char b : {'0', '1'}) {
          auto it = seen.find(r.out + b);
          if (it == seen.end()) continue;
          auto ext = std::find_if(it->second.begin(), it->second.end(), [&](const DyadicInterval& c) {
            return c.depth() > z.size() && std::string_view(c.bits()).substr(0, z.size()) == z;
          });
          if (ext == it->second.end()) continue;
          r.trace.push_back({DecodeStep::Kind::read, events_seen, r.out, z, *ext});
          z.push_back(beta[r.bits_read++]);
          progressed = true;
          break;
        }
      }
      if (!progressed) return;
    }
  };

  std::uint64_t count = 0;
  for (const auto& e : cb.enumeration()) {
    seen[e.target].push_back(e.codeword);
    settle(++count);
  }
  return r;
}

// ---------------------------------------------------------------------------

bool UseBoundReport::passed() const {
  return std::all_of(lines.begin(), lines.end(), [](const UseBoundLine& l) { return l.passed; });
}

std::string UseBoundReport::to_text() const {
  std::string out;
  auto opt = [](const auto& o) { return o ? std::to_string(*o) : std::string("none"); };
  for (const auto& l : lines) {
    out += l.passed ? "PASS" : "FAIL";
    out += " n=" + std::to_string(l.n) + " use=" + opt(l.use) + " bound=" + opt(l.bound) + "\n";
  }
  return out;
}

UseBoundReport check_use_bound(const LengthFunction& k, std::string_view alpha,
                               std::span<const std::size_t> use_profile) {
  UseBoundReport rep;
  for (std::size_t n = 1; n <= alpha.size(); ++n) {
    UseBoundLine line;
    line.n = n;
    if (n <= use_profile.size()) line.use = use_profile[n - 1];
    line.k = k.at(alpha.substr(0, n));
    for (std::size_t i = n; i <= alpha.size(); ++i) {
      if (auto ki = k.at(alpha.substr(0, i))) line.bound = line.bound ? std::min(*line.bound, *ki) : *ki;
    }
    line.passed = line.use && line.bound && *line.use <= *line.bound &&
                  (!line.k || *line.use <= *line.k);
    rep.lines.push_back(line);
  }
  return rep;
}

// ---------------------------------------------------------------------------

std::vector<std::pair<std::string, Exponent>> parse_k_table(std::string_view text,
                                                            Exponent max_label) {
  std::vector<std::pair<std::string, Exponent>> out;
  std::size_t lineno = 0;
  for (auto line : split_lines(text)) {
    ++lineno;
    auto f = split_fields(line);
    if (f.empty() || f[0].front() == '#') continue;
    if (f[0] != "k" || f.size() != 3) throw InputError("expected 'k <bits> <label>'", lineno);
    if (!is_bit_string(f[1]) || f[1] == "-") throw InputError("bad string in K table", lineno);
    auto label = parse_unsigned(f[2], "label", lineno);
    if (label < 1 || label > max_label) {
      throw InputError("label " + std::to_string(label) + " outside [1, " +
                           std::to_string(max_label) + "]",
                       lineno);
    }
    out.emplace_back(std::string(f[1]), static_cast<Exponent>(label));
  }
  return out;
}

std::vector<ContaminationEvent> parse_contamination(std::string_view text) {
  std::vector<ContaminationEvent> out;
  std::size_t lineno = 0;
  for (auto line : split_lines(text)) {
    ++lineno;
    auto f = split_fields(line);
    if (f.empty() || f[0].front() == '#') continue;
    if (f[0] != "contam" || f.size() < 2 || f.size() > 3) {
      throw InputError("expected 'contam <bits> [<after_requests>]'", lineno);
    }
    ContaminationEvent ev;
    try {
      ev.interval = DyadicInterval::parse_field(f[1]);
    } catch (const InputError& e) {
      throw InputError(e.what(), lineno);
    }
    if (f.size() == 3) ev.after_requests = parse_unsigned(f[2], "request position", lineno);
    out.push_back(std::move(ev));
  }
  return out;
}

std::string write_codebook(const CodeBook& cb) {
  const auto& k = cb.length_function();
  std::string out = "# hierkraft codebook\n";
  out += "depth " + std::to_string(k.depth) + "\n";
  for (const auto& [x, label] : k.labels) out += "k " + x + " " + std::to_string(label) + "\n";
  for (const auto& e : cb.enumeration()) {
    out += "code " + e.target + " " + e.codeword.field() + " " + std::to_string(e.seq) + "\n";
  }
  return out;
}

CodeBook parse_codebook(std::string_view text) {
  std::optional<unsigned> depth;
  std::vector<std::pair<std::string, Exponent>> raw;
  std::vector<Enumerated> enumeration;
  std::uint64_t last_seq = 0;
  std::size_t lineno = 0;
  for (auto line : split_lines(text)) {
    ++lineno;
    auto f = split_fields(line);
    if (f.empty() || f[0].front() == '#') continue;
    if (f[0] == "depth" && f.size() == 2) {
      depth = static_cast<unsigned>(parse_unsigned(f[1], "depth", lineno));
    } else if (f[0] == "k" && f.size() == 3) {
      if (!is_bit_string(f[1]) || f[1] == "-") throw InputError("bad string in K line", lineno);
      raw.emplace_back(std::string(f[1]),
                       static_cast<Exponent>(parse_unsigned(f[2], "label", lineno)));
    } else if (f[0] == "code" && f.size() == 4) {
      Enumerated e;
      e.target = std::string(f[1]);
      if (e.target.empty() || !is_bit_string(e.target)) throw InputError("bad code target", lineno);
      try {
        e.codeword = DyadicInterval::parse_field(f[2]);
      } catch (const InputError& err) {
        throw InputError(err.what(), lineno);
      }
      e.seq = parse_unsigned(f[3], "seq", lineno);
      if (e.seq <= last_seq) throw InputError("code seq must be strictly increasing", lineno);
      last_seq = e.seq;
      enumeration.push_back(std::move(e));
    } else {
      throw InputError("malformed codebook line", lineno);
    }
  }
  if (!depth) throw InputError("codebook has no depth line");
  auto k = load_length_function(raw, *depth);
  if (!k.dropped.empty()) throw InputError("codebook K table is not prefix-closed");
  return CodeBook(std::move(k), std::move(enumeration));
}

}  // namespace hierkraft
