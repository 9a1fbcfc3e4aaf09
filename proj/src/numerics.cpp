#include "memdecay/numerics.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "memdecay/error.hpp"

namespace memdecay {

std::vector<double> log_spaced_grid(double t_max, std::size_t count) {
  if (count < 2 || !(t_max > 0.0)) {
    throw Error(ErrorKind::parameter_domain,
                "log_spaced_grid needs count >= 2 and t_max > 0");
  }
  std::vector<double> grid(count);
  const double log_end = std::log1p(t_max);
  for (std::size_t i = 0; i < count; ++i) {
    grid[i] = std::expm1(log_end * static_cast<double>(i) /
                         static_cast<double>(count - 1));
  }
  grid.front() = 0.0;
  grid.back() = t_max;
  return grid;
}

std::vector<double> cumulative_trapezoid(std::span<const double> grid,
                                         std::span<const double> values) {
  if (grid.size() != values.size()) {
    throw Error(ErrorKind::internal, "cumulative_trapezoid: size mismatch");
  }
  std::vector<double> out(grid.size(), 0.0);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    out[i] = out[i - 1] + 0.5 * (grid[i] - grid[i - 1]) * (values[i] + values[i - 1]);
  }
  return out;
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw Error(ErrorKind::fit_domain, "line fit needs at least two points");
  }
  const double n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) {
    throw Error(ErrorKind::fit_domain, "line fit needs two distinct abscissae");
  }
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (fit.intercept + fit.slope * x[i]);
    ss += r * r;
  }
  fit.rms_residual = std::sqrt(ss / n);
  return fit;
}

std::pair<std::vector<double>, std::vector<double>> read_two_column_csv(
    const std::string& path, std::string_view header) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::io, path + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != header) {
    throw Error(ErrorKind::io, path + ": expected header \"" + std::string(header) + "\"");
  }
  std::vector<double> first;
  std::vector<double> second;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::istringstream row(line);
    double x = 0.0;
    double y = 0.0;
    char comma = 0;
    if (!(row >> x >> comma >> y) || comma != ',') {
      throw Error(ErrorKind::io, path + ":" + std::to_string(line_no) + ": malformed row");
    }
    first.push_back(x);
    second.push_back(y);
  }
  return {std::move(first), std::move(second)};
}

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

}  // namespace memdecay
