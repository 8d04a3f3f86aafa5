#include "hierkraft/stream.hpp"

#include <charconv>
#include <set>

#include "hierkraft/error.hpp"
#include "hierkraft/verify.hpp"

namespace hierkraft {

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  while (!text.empty()) {
    auto nl = text.find('\n');
    auto line = text.substr(0, nl);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    if (nl == std::string_view::npos) break;
    text.remove_prefix(nl + 1);
  }
  return lines;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    auto start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

std::uint64_t parse_unsigned(std::string_view field, const char* what, std::size_t line) {
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || p != field.data() + field.size() || field.empty()) {
    throw InputError(std::string("bad ") + what + " '" + std::string(field) + "'", line);
  }
  return v;
}

namespace {

DyadicInterval parse_bits_field(std::string_view f, std::size_t line) {
  try {
    return DyadicInterval::parse_field(f);
  } catch (const InputError& e) {
    throw InputError(e.what(), line);
  }
}

bool is_comment_or_blank(std::string_view line) {
  auto fields = split_fields(line);
  return fields.empty() || fields.front().front() == '#';
}

}  // namespace

StreamDirective RequestStream::request(NodeId id, NodeId parent, Exponent label) {
  StreamDirective d;
  d.kind = StreamDirective::Kind::request;
  d.id = id;
  d.parent = parent;
  d.label = label;
  return d;
}

StreamDirective RequestStream::contaminate(DyadicInterval iv) {
  StreamDirective d;
  d.kind = StreamDirective::Kind::contaminate;
  d.interval = std::move(iv);
  return d;
}

RequestStream parse_stream(std::string_view text, Exponent max_label) {
  RequestStream s;
  std::set<NodeId> known{root_id};
  NodeId last = 0;
  std::size_t lineno = 0;
  for (auto line : split_lines(text)) {
    ++lineno;
    auto f = split_fields(line);
    if (f.empty()) continue;
    if (f[0].front() == '#') {
      if (s.directives.empty()) {
        auto body = line.substr(line.find('#') + 1);
        if (!body.empty() && body.front() == ' ') body.remove_prefix(1);
        s.header.emplace_back(body);
      }
      continue;
    }
    if (f[0] == "req") {
      if (f.size() != 4) throw InputError("expected 'req <id> <parent> <label>'", lineno);
      auto id = parse_unsigned(f[1], "id", lineno);
      auto parent = parse_unsigned(f[2], "parent", lineno);
      auto label = parse_unsigned(f[3], "label", lineno);
      if (id == 0) throw InputError("request id must be positive", lineno);
      if (id <= last) throw InputError("request ids must be strictly increasing", lineno);
      if (!known.count(parent)) {
        throw InputError("parent " + std::to_string(parent) + " is not an earlier request", lineno);
      }
      if (label < 1) throw InputError("label must be >= 1", lineno);
      if (label > max_label) {
        throw InputError("label " + std::to_string(label) + " exceeds maximum " +
                             std::to_string(max_label),
                         lineno);
      }
      auto d = RequestStream::request(id, parent, static_cast<Exponent>(label));
      d.line = lineno;
      s.directives.push_back(d);
      known.insert(id);
      last = id;
    } else if (f[0] == "contam") {
      if (f.size() != 2) throw InputError("expected 'contam <bits>'", lineno);
      auto d = RequestStream::contaminate(parse_bits_field(f[1], lineno));
      d.line = lineno;
      s.directives.push_back(std::move(d));
    } else {
      throw InputError("unknown directive '" + std::string(f[0]) + "'", lineno);
    }
  }
  return s;
}

std::string write_stream(const RequestStream& stream) {
  std::string out;
  for (const auto& h : stream.header) out += "# " + h + "\n";
  for (const auto& d : stream.directives) {
    if (d.kind == StreamDirective::Kind::request) {
      out += "req " + std::to_string(d.id) + " " + std::to_string(d.parent) + " " +
             std::to_string(d.label) + "\n";
    } else {
      out += "contam " + d.interval.field() + "\n";
    }
  }
  return out;
}

std::string format_event(const Event& ev) {
  switch (ev.kind) {
    case Event::Kind::alloc:
      return "alloc " + std::to_string(ev.node) + " " + ev.interval.field() + " " +
             std::to_string(ev.seq);
    case Event::Kind::burn:
      return "burn " + ev.interval.field() + " " + std::to_string(ev.seq);
    case Event::Kind::error:
      return "error " + ev.error_kind + " " + std::to_string(ev.seq);
  }
  return {};
}

std::string write_event_log(const EventLog& log) {
  std::string out;
  for (const auto& ev : log) {
    out += format_event(ev);
    out += '\n';
  }
  return out;
}

EventLog parse_event_log(std::string_view text) {
  EventLog log;
  std::uint64_t last_seq = 0;
  std::size_t lineno = 0;
  for (auto line : split_lines(text)) {
    ++lineno;
    if (is_comment_or_blank(line)) continue;
    auto f = split_fields(line);
    Event ev;
    if (f[0] == "alloc" && f.size() == 4) {
      ev.kind = Event::Kind::alloc;
      ev.node = parse_unsigned(f[1], "id", lineno);
      ev.interval = parse_bits_field(f[2], lineno);
      ev.seq = parse_unsigned(f[3], "seq", lineno);
    } else if (f[0] == "burn" && f.size() == 3) {
      ev.kind = Event::Kind::burn;
      ev.interval = parse_bits_field(f[1], lineno);
      ev.seq = parse_unsigned(f[2], "seq", lineno);
    } else if (f[0] == "error" && f.size() == 3 && f[1] == "kraft_violation") {
      ev.kind = Event::Kind::error;
      ev.error_kind = std::string(f[1]);
      ev.seq = parse_unsigned(f[2], "seq", lineno);
    } else {
      throw InputError("malformed event line", lineno);
    }
    if (ev.seq <= last_seq) throw InputError("event seq must be strictly increasing", lineno);
    last_seq = ev.seq;
    log.push_back(std::move(ev));
  }
  return log;
}

RunResult run_stream(const RequestStream& stream, const RunOptions& options) {
  RunResult result;
  StepAuditor auditor;
  for (const auto& d : stream.directives) {
    if (d.kind == StreamDirective::Kind::contaminate) {
      result.tree.contaminate(d.interval);
      if (options.audit_each_step) auditor.on_contaminate(d.interval);
      continue;
    }
    auto begin = result.tree.log().size();
    try {
      result.tree.add_request(d.id, d.parent, d.label);
    } catch (const KraftViolation& e) {
      result.kraft_violation = true;
      result.violation_message = e.what();
      break;
    }
    ++result.requests_served;
    if (options.audit_each_step) {
      result.report.merge(auditor.after_request(result.tree, d.id, d.parent, d.label, begin));
    }
  }
  if (options.audit) result.report.merge(result.tree.audit());
  return result;
}

}  // namespace hierkraft
