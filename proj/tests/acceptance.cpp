// Acceptance suite: one PASS/FAIL line per criterion; non-zero exit on any failure.

#include <exception>
#include <iostream>

#include "criteria.hpp"

int main() {
  int failures = 0;
  for (const auto& c : criteria::all()) {
    criteria::Check r;
    try {
      r = c.run();
    } catch (const std::exception& e) {
      r = {false, std::string("exception: ") + e.what()};
    }
    if (!r.ok) ++failures;
    std::cout << (r.ok ? "PASS" : "FAIL") << " [" << c.number << "] " << c.name << ": " << r.detail
              << std::endl;
  }
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " failed")
            << std::endl;
  return failures == 0 ? 0 : 1;
}
