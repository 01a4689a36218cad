#pragma once

#include <algorithm>
#include <string>
#include <vector>

namespace bistable {

struct CheckResult {
  std::string clause;
  bool passed = false;
  std::string detail;
};

/// Ordered list of pass/fail clauses. Failures never throw; callers inspect.
struct CheckReport {
  std::vector<CheckResult> checks;

  void add(std::string clause, bool passed, std::string detail = {}) {
    checks.push_back({std::move(clause), passed, std::move(detail)});
  }
  void append(const CheckReport& other) {
    checks.insert(checks.end(), other.checks.begin(), other.checks.end());
  }
  bool passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
  }
  const CheckResult* find(const std::string& clause) const {
    for (const auto& c : checks)
      if (c.clause == clause) return &c;
    return nullptr;
  }
  std::vector<CheckResult> failures() const {
    std::vector<CheckResult> out;
    std::copy_if(checks.begin(), checks.end(), std::back_inserter(out),
                 [](const CheckResult& c) { return !c.passed; });
    return out;
  }
};

}  // namespace bistable
