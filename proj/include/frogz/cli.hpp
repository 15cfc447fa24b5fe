#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "frogz/laws.hpp"
#include "frogz/rumor.hpp"

namespace frogz::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kNumeric = 2, kAuditViolation = 3 };

/// Runs the command line. Results go to `out` unless --out names a file;
/// diagnostics go to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// "const:K", "bernoulli:Q", "poisson:LAMBDA", "geometric:S" (S = 1 is the
/// infinite-mean law).
OccupancyLaw parse_occupancy(std::string_view text);

/// "beta:A,B" or "point:P".
PiLaw parse_pi_law(std::string_view text);

/// "bernoulli:Q", "geometric:R", "powerlaw:C" or "pmf:P0,P1,...".
RadiusModel parse_radius(std::string_view text);

std::vector<double> parse_real_list(std::string_view text);

/// Comma list ("100,1000,1e4") or log grid "FROM:TO[:PER_DECADE]".
std::vector<std::int64_t> parse_int_list(std::string_view text);

/// Shortest round-trip decimal form; "inf", "-inf" and "nan" for non-finite values.
std::string format_number(double v);

}  // namespace frogz::cli
