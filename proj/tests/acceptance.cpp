#include <cstdio>
#include <cstdlib>
#include <string>

#include "lcd/suites.hpp"

// Runs every acceptance criterion at its stated tolerance; one line per criterion.
int main(int argc, char** argv) {
  std::uint64_t seed = 1;
  if (argc > 1) seed = std::strtoull(argv[1], nullptr, 10);
  int failed = 0;
  for (int id : lcd::suite_members("full")) {
    const lcd::CriterionResult r = lcd::run_criterion(id, seed, false);
    std::printf("%s criterion %d (%s) [%.1fs]: %s\n", r.pass ? "PASS" : "FAIL", r.id,
                r.title.c_str(), r.seconds, r.detail.c_str());
    std::fflush(stdout);
    failed += !r.pass;
  }
  std::printf("%d of 10 criteria passed\n", 10 - failed);
  return failed == 0 ? 0 : 1;
}
