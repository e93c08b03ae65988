// Acceptance criteria AC-1..AC-8, one PASS/FAIL line each. Optional
// arguments restrict the run to the listed criterion numbers.

#include <cstdlib>
#include <iostream>

#include "stochtame/verify/verify.hpp"

#ifndef STOCHTAME_CONFIG_DIR
#define STOCHTAME_CONFIG_DIR "configs"
#endif

int main(int argc, char** argv) {
  stochtame::AcceptanceOptions o;
  o.config_dir = STOCHTAME_CONFIG_DIR;
  for (int i = 1; i < argc; ++i) o.only.insert(std::atoi(argv[i]));
  o.log = [](const std::string& s) { std::cout << s << std::endl; };
  const auto results = stochtame::acceptance_suite(o);
  int failed = 0;
  for (const auto& r : results) failed += r.passed ? 0 : 1;
  std::cout << results.size() - failed << "/" << results.size() << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
