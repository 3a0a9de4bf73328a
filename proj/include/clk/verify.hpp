#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace clk::verify {

struct Check {
  std::string name;
  bool pass = false;
  double measured = 0.0;   // worst deviation or statistic observed
  double tolerance = 0.0;  // bound it is compared with
  std::string detail;
  double seconds = 0.0;
};

// Each check draws its own parameters from `seed`.
Check kernel_normalization(std::uint64_t seed, int cases = 25);
Check kernel_reciprocity(std::uint64_t seed, int pairs = 1000);
Check bessel_series_vs_integral(std::uint64_t seed, int points = 200);
Check plane_closed_form(std::uint64_t seed, int draws = 10);
Check halfline_closed_form(std::uint64_t seed, int draws = 10);
Check truncation_bounds(std::uint64_t seed, int draws = 20);
Check pushforward_closed_form(std::uint64_t seed, int points = 6);
Check pushforward_flux(std::uint64_t seed, int draws = 5);
Check equilibrium_collapse(std::uint64_t seed, int draws = 100);

// Analytics and wall property suites in a fixed order.
std::vector<Check> run_suite(std::uint64_t seed);

// "PASS name  measured <= tolerance  (detail)"
std::string format(const Check& c);

}  // namespace clk::verify
