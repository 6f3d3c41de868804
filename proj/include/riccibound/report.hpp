#pragma once
#include <iosfwd>
#include <string>
#include <vector>

#include "riccibound/certificate.hpp"
#include "riccibound/scenario.hpp"

namespace rb {

// Scenario outcome: one row per executed certificate. The JSON serialization
// is deterministic (no timestamps inside); wall time lives in a separate
// field filled by the caller and excluded from the determinism contract.
struct Report {
  int schema = 1;
  Scenario scenario;
  std::vector<std::string> suite_of;  // suite label per certificate
  std::vector<BoundCertificate> certificates;
  double wall_time_seconds = 0.0;

  bool all_pass() const;
  double worst_margin() const;
  size_t fail_count() const;
};

// Executes every (model, suite) cell of the scenario.
Report run_scenario(const Scenario& sc);

// Versioned JSON (schema: 1). Deterministic except the "timing" object.
void write_report_json(const Report& r, std::ostream& out);
Report read_report_json(std::istream& in);

// CSV margin table: suite,kind,model,params,min_margin,pass.
void write_margin_csv(const Report& r, std::ostream& out);

// Plot data for one certificate kind: parameter,lhs,rhs,margin rows.
// Throws UnknownKind when no certificate of that kind exists.
void write_plot_csv(const Report& r, const std::string& kind,
                    std::ostream& out);

}  // namespace rb
