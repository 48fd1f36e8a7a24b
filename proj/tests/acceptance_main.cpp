// Acceptance gate: runs every shipping criterion and prints one verdict line
// per criterion. Exits nonzero if any criterion fails. Run with --quick for
// the reduced-size smoke variant used during development.
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>
#include <vector>

#include "simplexmc/verify.hpp"

int main(int argc, char** argv) {
  simplexmc::AcceptanceOptions opt;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--quick") == 0) {
      opt.quick = true;
    } else if (std::strcmp(argv[i], "--seed") == 0 && i + 1 < argc) {
      opt.seed = std::strtoull(argv[++i], nullptr, 10);
    } else if (std::strcmp(argv[i], "--threads") == 0 && i + 1 < argc) {
      opt.threads = std::atoi(argv[++i]);
    } else {
      std::fprintf(stderr, "usage: %s [--quick] [--seed N] [--threads N]\n", argv[0]);
      return 2;
    }
  }

  std::vector<simplexmc::CriterionResult> results = simplexmc::run_acceptance(opt);
  bool all = true;
  for (const simplexmc::CriterionResult& r : results) {
    all = all && r.pass;
    std::printf("[%s] criterion %d: %s (%.2fs) %s\n", r.pass ? "PASS" : "FAIL", r.id,
                r.name.c_str(), r.seconds, r.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%s\n", all ? "all criteria passed" : "some criteria FAILED");
  return all ? 0 : 1;
}
