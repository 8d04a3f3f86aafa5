#include "hierkraft/report.hpp"

#include <algorithm>

namespace hierkraft {

bool AuditReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

const CheckResult* AuditReport::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

CheckResult& AuditReport::slot(std::string_view name) {
  for (auto& c : checks)
    if (c.name == name) return c;
  return checks.emplace_back(CheckResult{std::string(name), true, {}});
}

void AuditReport::record(std::string_view name, bool ok, std::string_view detail) {
  CheckResult& c = slot(name);
  if (!ok && c.passed) {
    c.passed = false;
    c.counterexample = std::string(detail);
  }
}

void AuditReport::merge(const AuditReport& other) {
  for (const auto& c : other.checks) record(c.name, c.passed, c.counterexample);
}

std::string AuditReport::to_text() const {
  std::string out;
  for (const auto& c : checks) {
    out += c.passed ? "PASS " : "FAIL ";
    out += c.name;
    if (!c.passed && !c.counterexample.empty()) {
      out += ": ";
      out += c.counterexample;
    }
    out += '\n';
  }
  return out;
}

}  // namespace hierkraft
