#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "hierkraft/hier.hpp"
#include "hierkraft/report.hpp"

namespace hierkraft {

inline constexpr Exponent default_max_label = 62;

// One line of a request-stream file:
//   req <id> <parent> <label>
//   contam <bits>
struct StreamDirective {
  enum class Kind { request, contaminate };

  Kind kind = Kind::request;
  NodeId id = 0;
  NodeId parent = root_id;
  Exponent label = 0;
  DyadicInterval interval;  // contaminate only
  std::size_t line = 0;

  friend bool operator==(const StreamDirective& a, const StreamDirective& b) {
    return a.kind == b.kind && a.id == b.id && a.parent == b.parent && a.label == b.label &&
           a.interval == b.interval;
  }
};

struct RequestStream {
  std::vector<std::string> header;  // leading comment lines, without '#'
  std::vector<StreamDirective> directives;

  static StreamDirective request(NodeId id, NodeId parent, Exponent label);
  static StreamDirective contaminate(DyadicInterval iv);
};

// Throws InputError (with line number) on malformed lines, non-increasing ids,
// parents that do not precede their sons, labels < 1 or > max_label.
RequestStream parse_stream(std::string_view text, Exponent max_label = default_max_label);
std::string write_stream(const RequestStream& stream);

// Event-log file:
//   alloc <id> <bits> <seq>
//   burn <bits> <seq>
//   error kraft_violation <seq>
std::string format_event(const Event& ev);
std::string write_event_log(const EventLog& log);
EventLog parse_event_log(std::string_view text);

struct RunOptions {
  bool audit = false;            // full audit of the final tree
  bool audit_each_step = false;  // incremental audit after every request
};

struct RunResult {
  bool kraft_violation = false;
  std::size_t requests_served = 0;
  std::string violation_message;
  RequestTree tree;
  AuditReport report;  // empty unless an audit was requested
};

// Drives the hierarchical allocator over a stream. A Kraft violation stops the
// run; the tree then holds the partial log ending in an error event.
RunResult run_stream(const RequestStream& stream, const RunOptions& options = {});

// Splits text into lines, trimming a trailing '\r'.
std::vector<std::string_view> split_lines(std::string_view text);
// Whitespace tokenizer.
std::vector<std::string_view> split_fields(std::string_view line);
// Strict unsigned parse; throws InputError naming `what`.
std::uint64_t parse_unsigned(std::string_view field, const char* what, std::size_t line);

}  // namespace hierkraft
