/*
 * hierkraft C API.
 *
 * Opaque handles, status codes, and heap strings. Every char** output is
 * allocated by the library and must be released with hk_string_free. On a
 * non-OK status, hk_last_error() describes the failure for the calling thread.
 */
#ifndef HIERKRAFT_H
#define HIERKRAFT_H

#include <stdint.h>

#if defined(_WIN32)
#  define HK_API __declspec(dllexport)
#elif defined(__GNUC__)
#  define HK_API __attribute__((visibility("default")))
#else
#  define HK_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum hk_status {
  HK_OK = 0,
  HK_KRAFT_VIOLATION = 1,
  HK_INPUT_ERROR = 2,
  HK_INVALID_LENGTH_FUNCTION = 3,
  HK_ENCODE_FAILURE = 4,
  HK_CHECK_FAILED = 5,
  HK_STATE_ERROR = 6,
  HK_INTERNAL_ERROR = 7
} hk_status;

typedef struct hk_tree hk_tree;
typedef struct hk_codebook hk_codebook;

HK_API const char* hk_status_name(hk_status status);
HK_API const char* hk_last_error(void);
HK_API void hk_string_free(char* s);

/* Request tree. Ids are assigned in arrival order starting at 1; 0 is the root. */
HK_API hk_status hk_tree_create(hk_tree** out);
HK_API void hk_tree_destroy(hk_tree* tree);
/* interval_out may be NULL. */
HK_API hk_status hk_tree_add_request(hk_tree* tree, uint64_t father, uint32_t label,
                                     uint64_t* id_out, char** interval_out);
HK_API hk_status hk_tree_contaminate(hk_tree* tree, const char* bits);
/* Space-separated owned intervals; "-" is the unit interval. */
HK_API hk_status hk_tree_owned(const hk_tree* tree, uint64_t id, char** out);
/* Exact dyadic strings such as "5/16". */
HK_API hk_status hk_tree_totals(const hk_tree* tree, char** revenue, char** endowments,
                                char** payouts);
/* HK_OK when every check passes, HK_CHECK_FAILED otherwise; report in both cases. */
HK_API hk_status hk_tree_audit(const hk_tree* tree, char** report_out);
HK_API hk_status hk_tree_event_log(const hk_tree* tree, char** log_out);

/*
 * Runs a request-stream text through the allocator. log_out receives the event
 * log (partial on HK_KRAFT_VIOLATION). With audit != 0, report_out receives the
 * per-step and final audit; a failed audit returns HK_CHECK_FAILED.
 * report_out may be NULL when audit == 0.
 */
HK_API hk_status hk_run_stream(const char* stream_text, uint32_t max_label, int audit,
                               char** log_out, char** report_out);

/* Replays a stream and its event log; report as above. */
HK_API hk_status hk_replay_audit(const char* stream_text, const char* log_text,
                                 uint32_t max_label, char** report_out);

/* contam_text may be NULL. On HK_INVALID_LENGTH_FUNCTION, hk_last_error()
 * names the exact Kraft sum. */
HK_API hk_status hk_codebook_build(const char* k_text, uint32_t depth, uint32_t max_label,
                                   const char* contam_text, hk_codebook** out);
HK_API hk_status hk_codebook_load(const char* codebook_text, hk_codebook** out);
HK_API void hk_codebook_destroy(hk_codebook* cb);
HK_API hk_status hk_codebook_serialize(const hk_codebook* cb, char** out);
/* Empty for codebooks loaded from text. */
HK_API hk_status hk_codebook_event_log(const hk_codebook* cb, char** log_out);
/* beta_out: bit string; chain_out: space-separated codewords. Empty values are "". */
HK_API hk_status hk_encode(const hk_codebook* cb, const char* alpha, char** beta_out,
                           char** chain_out);
/* out_bits: decoded bits; profile_out: space-separated oracle use per output bit. */
HK_API hk_status hk_decode(const hk_codebook* cb, const char* beta, char** out_bits,
                           char** profile_out);
/* Encodes alpha, decodes the result, and checks the oracle-use bounds. */
HK_API hk_status hk_check(const hk_codebook* cb, const char* alpha, char** report_out);

/* Random streams. */
HK_API hk_status hk_random_stream(uint64_t seed, uint32_t nodes, uint32_t max_label,
                                  double hier_prob, double contam_frac, char** stream_out);

typedef struct hk_fuzz_options {
  uint64_t seed;
  uint32_t nodes;
  uint32_t max_label;
  double contam_frac;
  uint32_t iters;
  double hier_prob; /* < 0: cycle flat and hierarchical mixes */
} hk_fuzz_options;

HK_API void hk_fuzz_options_init(hk_fuzz_options* opts);
/* HK_OK iff all iterations pass, HK_CHECK_FAILED otherwise. On failure the
 * failing_* outputs (which may be NULL) receive the first offending stream,
 * its log, and the audit report; on success they receive "". */
HK_API hk_status hk_fuzz(const hk_fuzz_options* opts, char** summary_out,
                         char** failing_stream_out, char** failing_log_out,
                         char** failing_report_out);

#ifdef __cplusplus
}
#endif

#endif /* HIERKRAFT_H */
