#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace recur {

struct SelftestCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Fast kernels against their direct oracles on exhaustive and random
/// inputs: cylinder returns (full and Markov shifts), repetition times,
/// LZ76 parsing, interval images and the single-pass point-return scan.
std::vector<SelftestCheck> run_selftest(std::uint64_t seed = 20240601);

}  // namespace recur
