#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace memdecay {

/// `count` points t_i = (1 + t_max)^(i/(count-1)) - 1, so t_0 = 0 and the
/// last point is t_max.
std::vector<double> log_spaced_grid(double t_max, std::size_t count);

/// Running trapezoid integral of `values` over the (possibly nonuniform)
/// abscissae `grid`; result[0] = 0.
std::vector<double> cumulative_trapezoid(std::span<const double> grid,
                                         std::span<const double> values);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double rms_residual = 0.0;
};

/// Ordinary least squares y = intercept + slope * x. Needs two distinct x.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

/// Reads a two-column numeric CSV whose first line must equal `header`
/// (e.g. "s,g"). Blank lines are skipped.
std::pair<std::vector<double>, std::vector<double>> read_two_column_csv(
    const std::string& path, std::string_view header);

/// %.17g formatting used for every floating-point value written to disk.
std::string format_double(double value);

}  // namespace memdecay
