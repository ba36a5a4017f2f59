#pragma once

#include "specbeam/experiment.hpp"

#include <iosfwd>
#include <vector>

namespace specbeam {

/// Runs the numbered verification suites (all ten when ids is empty),
/// printing one PASS/FAIL line per suite as it completes. Every row carries
/// the measured statistic and the tolerance it was gated at.
std::vector<TestRow> run_acceptance(const std::vector<int>& ids, std::ostream& out);

}  // namespace specbeam
