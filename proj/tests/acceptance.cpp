// Runs every acceptance criterion and prints one PASS/FAIL line per criterion.
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <string>

#include "hpk/checks.hpp"

int main(int argc, char** argv) {
  int jobs = 1;
  if (argc > 1) jobs = std::atoi(argv[1]);
  int failed = 0;
  for (const auto& c : hpk::checks::criteria()) {
    const auto t0 = std::chrono::steady_clock::now();
    bool pass = false;
    std::string note;
    try {
      pass = hpk::checks::run_criterion(c.id, jobs).at("pass").get<bool>();
    } catch (const std::exception& e) {
      note = std::string(" [") + e.what() + "]";
    }
    const double t = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (t > c.budget_seconds) {
      pass = false;
      note += " [over budget]";
    }
    std::printf("%s criterion %d: %s (%.1f s / %.0f s)%s\n", pass ? "PASS" : "FAIL", c.id, c.title.c_str(), t,
                c.budget_seconds, note.c_str());
    std::fflush(stdout);
    failed += pass ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
