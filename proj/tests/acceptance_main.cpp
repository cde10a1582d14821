#include <iostream>

#include "torusdist/acceptance.hpp"

int main() {
    auto results = torusdist::acceptance::run_all(20240817, &std::cout);
    bool all = true;
    for (const auto& r : results) all = all && r.passed;
    std::cout << (all ? "acceptance: all criteria passed" : "acceptance: FAILURES present")
              << std::endl;
    return all ? 0 : 1;
}
