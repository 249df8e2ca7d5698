#pragma once

// Text formats: profile and report CSVs, the scalar sidecar, the constants
// key=value block, and the two-curve SVG plot.
//
// Numbers are written in the shortest form that round-trips to the same
// double, with '.' as decimal separator and '\n' line endings.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pmc/analysis.hpp"
#include "pmc/constants.hpp"
#include "pmc/geometry.hpp"
#include "pmc/solver.hpp"

namespace pmc::io {

std::string format_double(double x);

/// Header `r,u`, one row per node, radii ascending.
void write_profile_csv(std::ostream& os, const RadialProfile& profile);
RadialProfile read_profile_csv(std::istream& is);

/// Header `r,u_lower,u_upper,contact`. u_upper is empty for a single sheet.
void write_report_csv(std::ostream& os, const SolveReport& report);

/// One column of a report CSV, by header name.
std::vector<double> read_csv_column(std::istream& is, const std::string& column);

/// JSON object with the energy terms, iterations, kkt_residual, convergence,
/// contact intervals, and r* values when known.
std::string report_sidecar(const StackProblem& problem, const SolveReport& report,
                           std::optional<double> grid_r_star, std::optional<double> oracle_r_star,
                           std::optional<std::uint64_t> seed);

std::string constants_key_value(const ConstantsReport& report);
std::string constants_csv_header();
std::string constants_csv_row(const ConstantsReport& report);

std::string regularity_key_value(const RegularityReport& report);

/// Cross-section of the two sheets over x in [-1, 1]: 800x600 viewBox, axes,
/// one polyline per sheet.
std::string two_curve_svg(const RadialProfile& lower, const RadialProfile& upper,
                          const std::string& title);

}  // namespace pmc::io
