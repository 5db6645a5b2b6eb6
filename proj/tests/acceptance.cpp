// Runs acceptance criteria 1..10 (or those given on the command line) and prints one
// line per criterion. Exit status 1 if any criterion fails.

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "lagexp/acceptance.hpp"

int main(int argc, char** argv) {
  std::vector<int> ids;
  for (int i = 1; i < argc; ++i) ids.push_back(std::atoi(argv[i]));
  bool ok = true;
  for (int id : ids.empty() ? std::vector<int>{1, 2, 3, 4, 5, 6, 7, 8, 9, 10} : ids) {
    const auto r = lagexp::run_criterion(id);
    std::cout << lagexp::format_result(r) << std::endl;
    ok = ok && r.passed;
  }
  return ok ? 0 : 1;
}
