#pragma once

#include <ostream>
#include <string>

namespace distreg::cli {

/// Runs the brute-force oracle suite (gram, qp, bfs or all), printing one
/// PASS/FAIL line per case. Returns true iff every case passes.
bool run_oracle(const std::string& suite, std::ostream& out);

}  // namespace distreg::cli
