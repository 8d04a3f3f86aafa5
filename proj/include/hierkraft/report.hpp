#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace hierkraft {

struct CheckResult {
  std::string name;
  bool passed = true;
  std::string counterexample;  // first counterexample, empty on pass
};

// Line-oriented report: one "PASS <name>" or "FAIL <name>: <detail>" per check.
struct AuditReport {
  std::vector<CheckResult> checks;

  bool passed() const;
  const CheckResult* find(const std::string& name) const;
  // Adds a check, or records the first failure for an existing one.
  void record(std::string_view name, bool ok, std::string_view detail = {});
  // Like record, but only builds the detail text for the first failure.
  template <class F>
  void check(std::string_view name, bool ok, F&& detail) {
    CheckResult& c = slot(name);
    if (!ok && c.passed) {
      c.passed = false;
      c.counterexample = std::string(detail());
    }
  }
  void merge(const AuditReport& other);
  std::string to_text() const;

 private:
  CheckResult& slot(std::string_view name);
};

}  // namespace hierkraft
