#pragma once

#include <string>
#include <vector>

namespace gltlab::report {

/// Shortest round-trip decimal form; "inf", "-inf", "nan" for non-finite values.
std::string number(double v);

/// Quotes a CSV field when it contains a comma, quote or newline.
std::string csv_field(const std::string& s);

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

/// Standalone SVG line chart on log-log axes. Non-positive values are
/// clipped to the smallest positive value present.
std::string loglog_chart(const std::string& title, const std::string& x_label, const std::string& y_label,
                         const std::vector<Series>& series);

}  // namespace gltlab::report
