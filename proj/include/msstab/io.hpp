#pragma once

// CSV writers and JSON readers for the command-line front end.

#include <complex>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "msstab/region.hpp"
#include "msstab/schemes.hpp"
#include "msstab/simulate.hpp"

namespace msstab {

/// Header `x,Y,scheme,verdict`.
void write_region_csv(std::ostream& os, const std::vector<RegionCell>& cells);

/// Header `t,scheme,ms_norm,diverged`; with `first_component` an extra
/// `ms_norm_first` column is written for system traces.
void write_trace_csv(std::ostream& os, const std::vector<MsTrace>& traces, bool first_component = false);

/// {"F": [[...], ...], "G": [[[...], ...], ...]}
SystemTestEq<double> parse_system_json(const std::string& text);
std::string system_to_json(const SystemTestEq<double>& eq);

/// A simulation run: config plus either a scalar or a system equation.
struct SimJob {
  SimConfig config;
  std::optional<ScalarTestEq<double>> scalar;
  std::optional<SystemTestEq<double>> system;
};

SimJob parse_sim_job_json(const std::string& text);
std::string sim_job_to_json(const SimJob& job);

/// "re" or "re,im".
std::complex<double> parse_complex(const std::string& token);

}  // namespace msstab
