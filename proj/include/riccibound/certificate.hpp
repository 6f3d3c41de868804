#pragma once
#include <limits>
#include <map>
#include <string>
#include <vector>

namespace rb {

// Uniform verdict container. pass <=> min_margin >= -tolerance.
struct BoundCertificate {
  std::string kind;
  std::string model;
  std::map<std::string, double> params;
  std::vector<double> samples;  // abscissae (radii, times, ...)
  std::vector<double> lhs;
  std::vector<double> rhs;
  double min_margin = 0.0;  // min over samples of rhs - lhs
  double tolerance = 1e-8;
  bool pass = false;
  std::map<std::string, double> details;  // measured constants, fits, trends
  std::string note;

  void finalize() {
    min_margin = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < lhs.size(); ++i)
      min_margin = std::min(min_margin, rhs[i] - lhs[i]);
    if (lhs.empty()) min_margin = 0.0;
    pass = min_margin >= -tolerance;
  }
};

}  // namespace rb
