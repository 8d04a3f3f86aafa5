// hierkraft command-line front end. Talks to the library only through the C API.
//
// Exit codes: 0 ok, 1 Kraft violation, 2 malformed input, 3 failed
// verification (audit, use-bound check, fuzz, replay), 4 internal error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <iterator>
#include <memory>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "hierkraft/hierkraft.h"

namespace {

enum Exit { exit_ok = 0, exit_violation = 1, exit_input = 2, exit_verify = 3, exit_internal = 4 };

struct CString {
  char* p = nullptr;
  ~CString() { hk_string_free(p); }
  char** out() { return &p; }
  std::string str() const { return p ? std::string(p) : std::string(); }
};

struct InputFailure {
  std::string message;
};

int exit_code(hk_status s) {
  switch (s) {
    case HK_OK: return exit_ok;
    case HK_KRAFT_VIOLATION: return exit_violation;
    case HK_INPUT_ERROR:
    case HK_INVALID_LENGTH_FUNCTION:
    case HK_ENCODE_FAILURE: return exit_input;
    case HK_CHECK_FAILED: return exit_verify;
    default: return exit_internal;
  }
}

int report(hk_status s) {
  if (s != HK_OK) std::cerr << "hierkraft: " << hk_status_name(s) << ": " << hk_last_error() << "\n";
  return exit_code(s);
}

std::string read_input(const std::string& path) {
  if (path == "-") {
    return std::string(std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>());
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputFailure{"cannot read " + path};
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_output(const std::string& path, const std::string& text) {
  if (path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputFailure{"cannot write " + path};
  out << text;
}

// "-" on the command line and in printed output is the empty bit string.
std::string bits_arg(const std::string& s) { return s == "-" ? std::string() : s; }
std::string bits_out(const std::string& s) { return s.empty() ? std::string("-") : s; }

std::string trim(std::string s) {
  auto issp = [](char c) { return c == ' ' || c == '\n' || c == '\r' || c == '\t'; };
  while (!s.empty() && issp(s.back())) s.pop_back();
  std::size_t i = 0;
  while (i < s.size() && issp(s[i])) ++i;
  return s.substr(i);
}

using Codebook = std::unique_ptr<hk_codebook, decltype(&hk_codebook_destroy)>;

hk_status load_codebook(const std::string& path, Codebook& cb) {
  hk_codebook* raw = nullptr;
  auto s = hk_codebook_load(read_input(path).c_str(), &raw);
  cb.reset(raw);
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hierarchical Kraft allocation, contaminated space, and oracle-use coding"};
  app.require_subcommand(1);

  // alloc
  std::string in_path, out_path = "-";
  bool audit = false;
  unsigned max_label = 62;
  auto* alloc = app.add_subcommand("alloc", "Run a request stream and write its event log");
  alloc->add_option("--in", in_path, "Request-stream file ('-' for stdin)")->required();
  alloc->add_option("--out", out_path, "Event-log file ('-' for stdout)");
  alloc->add_flag("--audit", audit,
                  "Audit every step and the final tree; report on stdout (stderr if the log is)");
  alloc->add_option("--max-label", max_label, "Largest accepted label")->check(CLI::Range(1u, 4096u));

  // replay
  std::string replay_stream, replay_log;
  auto* replay = app.add_subcommand("replay", "Re-derive all invariants from a stream and its log");
  replay->add_option("--in", replay_stream, "Request-stream file")->required();
  replay->add_option("--log", replay_log, "Event-log file")->required();
  replay->add_option("--max-label", max_label, "Largest accepted label")->check(CLI::Range(1u, 4096u));

  // gen
  std::uint64_t gen_seed = 1;
  unsigned gen_nodes = 10;
  double gen_hier = 0.5, gen_contam = 0.0;
  unsigned gen_label = 16;
  auto* gen = app.add_subcommand("gen", "Write a seeded random request stream");
  gen->add_option("--seed", gen_seed);
  gen->add_option("--n", gen_nodes, "Node budget");
  gen->add_option("--max-label", gen_label)->check(CLI::Range(1u, 4096u));
  gen->add_option("--hier-prob", gen_hier)->check(CLI::Range(0.0, 1.0));
  gen->add_option("--contam-frac", gen_contam)->check(CLI::Range(0.0, 1.0));
  gen->add_option("--out", out_path);

  // codec
  auto* codec = app.add_subcommand("codec", "Hierarchical prefix codes with bounded oracle use");
  codec->require_subcommand(1);
  std::string k_path, contam_path, cb_path, log_path, alpha, beta;
  unsigned depth = 0;
  auto* build = codec->add_subcommand("build", "Build a codebook from a K table");
  build->add_option("--k", k_path, "K table: lines 'k <bits> <label>'")->required();
  build->add_option("--depth", depth, "Maximum string length")->required()->check(CLI::PositiveNumber);
  build->add_option("--contam", contam_path, "Contamination: lines 'contam <bits> [<after>]'");
  build->add_option("--out", cb_path, "Codebook file")->required();
  build->add_option("--log", log_path, "Event-log file (default <out>.log)");
  build->add_option("--max-label", max_label)->check(CLI::Range(1u, 4096u));

  auto* enc = codec->add_subcommand("encode", "Print the oracle prefix and codeword chain");
  enc->add_option("--codebook", cb_path)->required();
  enc->add_option("--alpha", alpha, "Target bits ('-' for empty)")->required();

  auto* dec = codec->add_subcommand("decode", "Run the oracle machine on beta");
  dec->add_option("--codebook", cb_path)->required();
  auto* beta_opt = dec->add_option("--beta", beta, "Oracle bits ('-' for empty); stdin if omitted");

  auto* chk = codec->add_subcommand("check", "Check oracle use against K along alpha");
  chk->add_option("--codebook", cb_path)->required();
  chk->add_option("--alpha", alpha, "Target bits")->required();

  // fuzz
  hk_fuzz_options fo;
  hk_fuzz_options_init(&fo);
  std::string dump_dir = ".";
  auto* fuzz = app.add_subcommand("fuzz", "Random streams through allocator and replay audit");
  fuzz->add_option("--seed", fo.seed);
  fuzz->add_option("--n", fo.nodes, "Node budget per stream");
  fuzz->add_option("--max-label", fo.max_label)->check(CLI::Range(1u, 4096u));
  fuzz->add_option("--contam-frac", fo.contam_frac)->check(CLI::Range(0.0, 1.0));
  fuzz->add_option("--iters", fo.iters);
  fuzz->add_option("--hier-prob", fo.hier_prob, "Fixed hierarchy probability (default: cycle)");
  fuzz->add_option("--dump-dir", dump_dir, "Where the first failing stream and log go");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? exit_ok : exit_input;
  }

  try {
    if (*alloc) {
      CString log, rep;
      auto s = hk_run_stream(read_input(in_path).c_str(), max_label, audit ? 1 : 0, log.out(),
                             audit ? rep.out() : nullptr);
      if (log.p) write_output(out_path, log.str());
      if (audit && rep.p) (out_path == "-" ? std::cerr : std::cout) << rep.str();
      return report(s);
    }
    if (*replay) {
      CString rep;
      auto s = hk_replay_audit(read_input(replay_stream).c_str(), read_input(replay_log).c_str(),
                               max_label, rep.out());
      std::cout << rep.str();
      return report(s);
    }
    if (*gen) {
      CString text;
      auto s = hk_random_stream(gen_seed, gen_nodes, gen_label, gen_hier, gen_contam, text.out());
      if (s == HK_OK) write_output(out_path, text.str());
      return report(s);
    }
    if (*build) {
      std::string contam_text;
      if (!contam_path.empty()) contam_text = read_input(contam_path);
      hk_codebook* raw = nullptr;
      auto s = hk_codebook_build(read_input(k_path).c_str(), depth, max_label,
                                 contam_path.empty() ? nullptr : contam_text.c_str(), &raw);
      Codebook cb(raw, &hk_codebook_destroy);
      if (s != HK_OK) return report(s);
      CString text, log;
      hk_codebook_serialize(cb.get(), text.out());
      hk_codebook_event_log(cb.get(), log.out());
      write_output(cb_path, text.str());
      write_output(log_path.empty() ? cb_path + ".log" : log_path, log.str());
      return exit_ok;
    }
    if (*enc || *dec || *chk) {
      Codebook cb(nullptr, &hk_codebook_destroy);
      if (auto s = load_codebook(cb_path, cb); s != HK_OK) return report(s);
      if (*enc) {
        CString b, chain;
        auto s = hk_encode(cb.get(), bits_arg(alpha).c_str(), b.out(), chain.out());
        if (s == HK_OK) std::cout << bits_out(b.str()) << "\n" << bits_out(chain.str()) << "\n";
        return report(s);
      }
      if (*dec) {
        std::string bits = beta_opt->count() ? bits_arg(beta) : trim(read_input("-"));
        CString out, profile;
        auto s = hk_decode(cb.get(), bits.c_str(), out.out(), profile.out());
        if (s == HK_OK) std::cout << bits_out(out.str()) << "\n" << bits_out(profile.str()) << "\n";
        return report(s);
      }
      CString rep;
      auto s = hk_check(cb.get(), bits_arg(alpha).c_str(), rep.out());
      std::cout << rep.str();
      return report(s);
    }
    if (*fuzz) {
      CString summary, bad_stream, bad_log, bad_report;
      auto s = hk_fuzz(&fo, summary.out(), bad_stream.out(), bad_log.out(), bad_report.out());
      std::cout << summary.str() << "\n";
      if (s == HK_CHECK_FAILED) {
        auto base = dump_dir + "/fuzz_failure";
        write_output(base + ".stream", bad_stream.str());
        write_output(base + ".log", bad_log.str());
        write_output(base + ".report", bad_report.str());
        std::cerr << "hierkraft: first failure written to " << base << ".{stream,log,report}\n";
      }
      return report(s);
    }
  } catch (const InputFailure& f) {
    std::cerr << "hierkraft: " << f.message << "\n";
    return exit_input;
  }
  return exit_internal;
}
