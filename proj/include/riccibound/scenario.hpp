#pragma once
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "riccibound/model.hpp"

namespace rb {

struct ConfigParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ModelUnknown : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct UnknownKind : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A verification scenario: which models, which suites, which ladders.
struct Scenario {
  std::string name = "scenario";
  std::vector<ModelSpec> models;
  // suite names: curvature, radial, functional, pde, convergence, all
  std::vector<std::string> suites;
  std::vector<double> r_ladder = {0.25, 0.5, 1.0};
  uint64_t seed = 2026;
  double tolerance = 1e-8;
  long mc_pairs = 200000;
  std::string out_dir = ".";

  void validate() const;  // at least one model and one suite, ladders nonempty
};

// Catalog lookup by the model's canonical name. Throws ModelUnknown.
const ModelSpec& model_by_name(const std::string& name);

// Flat sectioned key = value text:
//   [scenario] name/seed/tolerance/suites/pairs, [ladders] r,
//   one [model] section per model (name = <catalog>, optional field
//   overrides dim/lambda/K/alpha/curvature).
Scenario parse_scenario(std::istream& in);
Scenario load_scenario(const std::string& path);

}  // namespace rb
