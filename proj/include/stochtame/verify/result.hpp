#pragma once

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

namespace stochtame {

struct CheckResult {
  std::string id;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

inline std::string format_result(const CheckResult& r) {
  char head[96];
  std::snprintf(head, sizeof head, "%-6s %s  (%.1f s)  ", r.passed ? "PASS" : "FAIL", r.id.c_str(), r.seconds);
  return head + r.detail;
}

inline bool all_passed(const std::vector<CheckResult>& v) {
  for (const auto& r : v)
    if (!r.passed) return false;
  return true;
}

namespace detail {

/// Times `body`; an exception becomes a failed result carrying its message.
inline CheckResult timed(const std::string& id, const std::function<CheckResult()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  CheckResult r;
  try {
    r = body();
  } catch (const std::exception& e) {
    r.passed = false;
    r.detail = std::string("error: ") + e.what();
  }
  r.id = id;
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

inline std::string fmt(const char* f, double a) {
  char b[64];
  std::snprintf(b, sizeof b, f, a);
  return b;
}

}  // namespace detail

}  // namespace stochtame
