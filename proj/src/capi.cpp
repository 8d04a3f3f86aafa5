#include "hierkraft/hierkraft.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "hierkraft/codec.hpp"
#include "hierkraft/error.hpp"
#include "hierkraft/hier.hpp"
#include "hierkraft/stream.hpp"
#include "hierkraft/verify.hpp"

using namespace hierkraft;

struct hk_tree {
  RequestTree tree;
};

struct hk_codebook {
  CodeBook book;
};

namespace {

thread_local std::string last_error;

hk_status fail(hk_status s, const std::string& msg) {
  last_error = msg;
  return s;
}

char* dup(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (!p) throw std::bad_alloc();
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

void put(char** out, const std::string& s) {
  if (out) *out = dup(s);
}

// Maps the library's exceptions onto status codes.
template <class F>
hk_status guarded(F&& body) {
  try {
    last_error.clear();
    return body();
  } catch (const KraftViolation& e) {
    return fail(HK_KRAFT_VIOLATION, e.what());
  } catch (const InvalidLengthFunction& e) {
    return fail(HK_INVALID_LENGTH_FUNCTION, e.what());
  } catch (const InputError& e) {
    return fail(HK_INPUT_ERROR, e.what());
  } catch (const EncodeFailure& e) {
    return fail(HK_ENCODE_FAILURE, e.what());
  } catch (const CapacityError& e) {
    return fail(HK_INPUT_ERROR, e.what());
  } catch (const std::bad_alloc&) {
    return fail(HK_INTERNAL_ERROR, "out of memory");
  } catch (const std::logic_error& e) {
    return fail(HK_STATE_ERROR, e.what());
  } catch (const std::exception& e) {
    return fail(HK_INTERNAL_ERROR, e.what());
  } catch (...) {
    return fail(HK_INTERNAL_ERROR, "unknown error");
  }
}

std::string join(const std::vector<DyadicInterval>& ivs) {
  std::string s;
  for (const auto& iv : ivs) {
    if (!s.empty()) s += ' ';
    s += iv.field();
  }
  return s;
}

}  // namespace

extern "C" {

const char* hk_status_name(hk_status status) {
  switch (status) {
    case HK_OK: return "ok";
    case HK_KRAFT_VIOLATION: return "kraft_violation";
    case HK_INPUT_ERROR: return "input_error";
    case HK_INVALID_LENGTH_FUNCTION: return "invalid_length_function";
    case HK_ENCODE_FAILURE: return "encode_failure";
    case HK_CHECK_FAILED: return "check_failed";
    case HK_STATE_ERROR: return "state_error";
    case HK_INTERNAL_ERROR: return "internal_error";
  }
  return "unknown";
}

const char* hk_last_error(void) { return last_error.c_str(); }

void hk_string_free(char* s) { std::free(s); }

hk_status hk_tree_create(hk_tree** out) {
  if (!out) return fail(HK_INPUT_ERROR, "null output handle");
  return guarded([&] {
    *out = new hk_tree{};
    return HK_OK;
  });
}

void hk_tree_destroy(hk_tree* tree) { delete tree; }

hk_status hk_tree_add_request(hk_tree* tree, uint64_t father, uint32_t label, uint64_t* id_out,
                              char** interval_out) {
  if (!tree) return fail(HK_INPUT_ERROR, "null tree handle");
  return guarded([&] {
    auto a = tree->tree.add_request(father, label);
    if (id_out) *id_out = a.id;
    put(interval_out, a.interval.field());
    return HK_OK;
  });
}

hk_status hk_tree_contaminate(hk_tree* tree, const char* bits) {
  if (!tree || !bits) return fail(HK_INPUT_ERROR, "null argument");
  return guarded([&] {
    tree->tree.contaminate(DyadicInterval::parse_field(bits));
    return HK_OK;
  });
}

hk_status hk_tree_owned(const hk_tree* tree, uint64_t id, char** out) {
  if (!tree || !out) return fail(HK_INPUT_ERROR, "null argument");
  return guarded([&] {
    put(out, join(tree->tree.owned(id)));
    return HK_OK;
  });
}

hk_status hk_tree_totals(const hk_tree* tree, char** revenue, char** endowments, char** payouts) {
  if (!tree) return fail(HK_INPUT_ERROR, "null tree handle");
  return guarded([&] {
    put(revenue, tree->tree.revenue().to_string());
    put(endowments, tree->tree.endowments().to_string());
    put(payouts, tree->tree.payouts().to_string());
    return HK_OK;
  });
}

hk_status hk_tree_audit(const hk_tree* tree, char** report_out) {
  if (!tree) return fail(HK_INPUT_ERROR, "null tree handle");
  return guarded([&] {
    auto rep = tree->tree.audit();
    put(report_out, rep.to_text());
    return rep.passed() ? HK_OK : fail(HK_CHECK_FAILED, "audit failed");
  });
}

hk_status hk_tree_event_log(const hk_tree* tree, char** log_out) {
  if (!tree || !log_out) return fail(HK_INPUT_ERROR, "null argument");
  return guarded([&] {
    put(log_out, write_event_log(tree->tree.log()));
    return HK_OK;
  });
}

hk_status hk_run_stream(const char* stream_text, uint32_t max_label, int audit, char** log_out,
                        char** report_out) {
  if (!stream_text || !log_out) return fail(HK_INPUT_ERROR, "null argument");
  return guarded([&] {
    auto stream = parse_stream(stream_text, max_label);
    RunOptions opts;
    opts.audit = audit != 0;
    opts.audit_each_step = audit != 0;
    auto run = run_stream(stream, opts);
    put(log_out, write_event_log(run.tree.log()));
    if (audit) put(report_out, run.report.to_text());
    if (run.kraft_violation) return fail(HK_KRAFT_VIOLATION, run.violation_message);
    if (audit && !run.report.passed()) return fail(HK_CHECK_FAILED, "audit failed");
    return HK_OK;
  });
}

hk_status hk_replay_audit(const char* stream_text, const char* log_text, uint32_t max_label,
                          char** report_out) {
  if (!stream_text || !log_text) return fail(HK_INPUT_ERROR, "null argument");
  return guarded([&] {
    auto rep = replay_audit(parse_stream(stream_text, max_label), parse_event_log(log_text));
    put(report_out, rep.to_text());
    return rep.passed() ? HK_OK : fail(HK_CHECK_FAILED, "replay audit failed");
  });
}

hk_status hk_codebook_build(const char* k_text, uint32_t depth, uint32_t max_label,
                            const char* contam_text, hk_codebook** out) {
  if (!k_text || !out) return fail(HK_INPUT_ERROR, "null argument");
  return guarded([&] {
    auto k = load_length_function(parse_k_table(k_text, max_label), depth);
    std::vector<ContaminationEvent> contam;
    if (contam_text) contam = parse_contamination(contam_text);
    auto book = build_codebook(k, contam);
    *out = new hk_codebook{std::move(book)};
    return HK_OK;
  });
}

hk_status hk_codebook_load(const char* codebook_text, hk_codebook** out) {
  if (!codebook_text || !out) return fail(HK_INPUT_ERROR, "null argument");
  return guarded([&] {
    *out = new hk_codebook{parse_codebook(codebook_text)};
    return HK_OK;
  });
}

void hk_codebook_destroy(hk_codebook* cb) { delete cb; }

hk_status hk_codebook_serialize(const hk_codebook* cb, char** out) {
  if (!cb || !out) return fail(HK_INPUT_ERROR, "null argument");
  return guarded([&] {
    put(out, write_codebook(cb->book));
    return HK_OK;
  });
}

hk_status hk_codebook_event_log(const hk_codebook* cb, char** log_out) {
  if (!cb || !log_out) return fail(HK_INPUT_ERROR, "null argument");
  return guarded([&] {
    put(log_out, write_event_log(cb->book.events()));
    return HK_OK;
  });
}

hk_status hk_encode(const hk_codebook* cb, const char* alpha, char** beta_out, char** chain_out) {
  if (!cb || !alpha) return fail(HK_INPUT_ERROR, "null argument");
  return guarded([&] {
    auto r = encode(cb->book, alpha);
    put(beta_out, r.beta);
    put(chain_out, join(r.chain));
    return HK_OK;
  });
}

hk_status hk_decode(const hk_codebook* cb, const char* beta, char** out_bits, char** profile_out) {
  if (!cb || !beta) return fail(HK_INPUT_ERROR, "null argument");
  return guarded([&] {
    auto r = decode(cb->book, beta);
    std::string profile;
    for (auto u : r.use_profile) {
      if (!profile.empty()) profile += ' ';
      profile += std::to_string(u);
    }
    put(out_bits, r.out);
    put(profile_out, profile);
    return HK_OK;
  });
}

hk_status hk_check(const hk_codebook* cb, const char* alpha, char** report_out) {
  if (!cb || !alpha) return fail(HK_INPUT_ERROR, "null argument");
  return guarded([&] {
    auto enc = encode(cb->book, alpha);
    auto dec = decode(cb->book, enc.beta);
    auto rep = check_use_bound(cb->book.length_function(), alpha, dec.use_profile);
    std::string text = rep.to_text();
    bool prefix_ok = std::string_view(dec.out).substr(0, std::strlen(alpha)) == alpha;
    if (!prefix_ok) text += "FAIL decoded output " + dec.out + " does not start with alpha\n";
    put(report_out, text);
    return rep.passed() && prefix_ok ? HK_OK : fail(HK_CHECK_FAILED, "use bound check failed");
  });
}

hk_status hk_random_stream(uint64_t seed, uint32_t nodes, uint32_t max_label, double hier_prob,
                           double contam_frac, char** stream_out) {
  if (!stream_out) return fail(HK_INPUT_ERROR, "null argument");
  return guarded([&] {
    StreamSpec spec;
    spec.seed = seed;
    spec.node_budget = nodes;
    spec.max_label = max_label;
    spec.hierarchy_probability = hier_prob;
    spec.contamination_fraction = contam_frac;
    put(stream_out, write_stream(random_stream(spec)));
    return HK_OK;
  });
}

void hk_fuzz_options_init(hk_fuzz_options* opts) {
  if (!opts) return;
  FuzzOptions d;
  opts->seed = d.seed;
  opts->nodes = d.nodes;
  opts->max_label = d.max_label;
  opts->contam_frac = d.contam_frac;
  opts->iters = d.iters;
  opts->hier_prob = d.hier_prob;
}

hk_status hk_fuzz(const hk_fuzz_options* opts, char** summary_out, char** failing_stream_out,
                  char** failing_log_out, char** failing_report_out) {
  if (!opts || !summary_out) return fail(HK_INPUT_ERROR, "null argument");
  return guarded([&] {
    if (opts->max_label < 1) throw InputError("max label must be >= 1");
    if (!(opts->contam_frac >= 0.0 && opts->contam_frac <= 1.0))
      throw InputError("contamination fraction must lie in [0, 1]");
    FuzzOptions o;
    o.seed = opts->seed;
    o.nodes = opts->nodes;
    o.max_label = opts->max_label;
    o.contam_frac = opts->contam_frac;
    o.iters = opts->iters;
    o.hier_prob = opts->hier_prob;
    auto r = run_fuzz(o);
    put(summary_out, r.summary);
    put(failing_stream_out, r.failing_stream);
    put(failing_log_out, r.failing_log);
    put(failing_report_out, r.failing_report);
    return r.all_passed() ? HK_OK : fail(HK_CHECK_FAILED, r.summary);
  });
}

}  // extern "C"
