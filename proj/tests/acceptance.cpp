#include <cstdio>
#include <cstdlib>
#include <vector>

#include "vwlab/validation.hpp"

// One PASS/FAIL line per criterion; optional arguments select criterion ids.
int main(int argc, char** argv) {
  std::vector<int> ids;
  for (int i = 1; i < argc; ++i) ids.push_back(std::atoi(argv[i]));
  if (ids.empty()) ids = vwlab::all_criteria();
  int failed = 0;
  for (int id : ids) {
    const auto r = vwlab::run_criterion(id, [](const std::string& m) { std::fprintf(stderr, "  .. %s\n", m.c_str()); });
    std::printf("%s %2d %-26s %s seconds=%.3g (limit %.0f)\n", r.pass ? "PASS" : "FAIL", r.id, r.name.c_str(),
                r.detail.c_str(), r.seconds, r.limit_seconds);
    std::fflush(stdout);
    failed += r.pass ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
