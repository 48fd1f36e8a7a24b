#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace simplexmc {

struct AcceptanceOptions {
  std::uint64_t seed = 7;
  bool quick = false;  // smaller populations, fewer replicates, looser noise bounds
  std::string out_dir; // where the determinism bundles land; empty means a temp dir
  int threads = 0;     // worker cap for the multi-worker determinism leg (0 = hardware)
};

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  double seconds = 0.0;
  std::string detail;
};

/// The ten-item acceptance gate, one result per criterion. Criteria are
/// independent and all of them run even after a failure; tolerances are
/// pinned in the implementation, not configurable.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt);

/// A fixed set of library artifacts plus their manifest, written under dir
/// (created if needed); returns the file paths. The determinism criterion
/// writes the bundle twice under different worker caps and compares bytes.
std::vector<std::string> emit_bundle(const std::string& dir, std::uint64_t seed);

}
