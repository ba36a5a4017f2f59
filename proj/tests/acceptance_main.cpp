// Acceptance suite runner: executes every numbered criterion at its pinned
// tolerance and prints one PASS/FAIL line per criterion. Exit status is
// nonzero when any criterion fails. Criterion ids may be passed as
// arguments to run a subset.

#include "specbeam/acceptance.hpp"

#include <cstdlib>
#include <iostream>
#include <vector>

int main(int argc, char** argv) {
  std::vector<int> ids;
  for (int i = 1; i < argc; ++i) ids.push_back(std::atoi(argv[i]));

  const std::vector<specbeam::TestRow> rows = specbeam::run_acceptance(ids, std::cout);

  int failures = 0;
  for (const specbeam::TestRow& row : rows) failures += row.pass ? 0 : 1;
  std::cout << rows.size() - failures << "/" << rows.size() << " criteria passed\n";
  return failures == 0 ? 0 : 1;
}
