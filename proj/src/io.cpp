#include "msstab/io.hpp"

#include <json.hpp>

#include <cmath>
#include <iomanip>
#include <sstream>

#include "msstab/errors.hpp"

namespace msstab {

using nlohmann::json;

void write_region_csv(std::ostream& os, const std::vector<RegionCell>& cells) {
  os << "x,Y,scheme,verdict\n";
  os << std::setprecision(10);
  for (const auto& c : cells) os << c.x << ',' << c.Y << ',' << c.scheme << ',' << to_string(c.verdict) << '\n';
}

void write_trace_csv(std::ostream& os, const std::vector<MsTrace>& traces, bool first_component) {
  os << "t,scheme,ms_norm,diverged" << (first_component ? ",ms_norm_first" : "") << '\n';
  os << std::setprecision(17);
  for (const auto& tr : traces) {
    for (std::size_t i = 0; i < tr.times.size(); ++i) {
      os << tr.times[i] << ',' << tr.label << ',' << tr.ms_norm[i] << ',' << (tr.diverged[i] ? 1 : 0);
      if (first_component) os << ',' << (tr.ms_norm_first.empty() ? tr.ms_norm[i] : tr.ms_norm_first[i]);
      os << '\n';
    }
  }
}

namespace {

MatrixX<double> matrix_from_json(const json& rows, const char* what) {
  if (!rows.is_array() || rows.empty()) throw Error(ErrorCode::InvalidArgument, std::string(what) + " must be a non-empty array");
  const std::size_t n = rows.size();
  const std::size_t cols = rows[0].is_array() ? rows[0].size() : 0;
  MatrixX<double> m(n, cols);
  for (std::size_t i = 0; i < n; ++i) {
    if (!rows[i].is_array() || rows[i].size() != cols) {
      throw Error(ErrorCode::DimensionMismatch, std::string(what) + " has ragged rows");
    }
    for (std::size_t j = 0; j < cols; ++j) {
      if (!rows[i][j].is_number()) throw Error(ErrorCode::InvalidArgument, std::string(what) + " entries must be numbers");
      m(i, j) = rows[i][j].get<double>();
    }
  }
  return m;
}

json matrix_to_json(const MatrixX<double>& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

SystemTestEq<double> system_from_json(const json& j) {
  if (!j.is_object() || !j.contains("F") || !j.contains("G")) {
    throw Error(ErrorCode::InvalidArgument, "system JSON needs keys F and G");
  }
  SystemTestEq<double> eq;
  eq.F = matrix_from_json(j.at("F"), "F");
  const json& g = j.at("G");
  if (!g.is_array()) throw Error(ErrorCode::InvalidArgument, "G must be an array of matrices");
  for (const auto& gr : g) eq.G.push_back(matrix_from_json(gr, "G"));
  eq.validate();
  return eq;
}

json system_json(const SystemTestEq<double>& eq) {
  json g = json::array();
  for (const auto& gr : eq.G) g.push_back(matrix_to_json(gr));
  return {{"F", matrix_to_json(eq.F)}, {"G", g}};
}

std::complex<double> complex_from_json(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2) return {j[0].get<double>(), j[1].get<double>()};
  throw Error(ErrorCode::InvalidArgument, "complex value must be a number or [re, im]");
}

json parse_or_throw(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("invalid JSON: ") + e.what());
  }
}

}  // namespace

SystemTestEq<double> parse_system_json(const std::string& text) {
  try {
    return system_from_json(parse_or_throw(text));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("invalid system JSON: ") + e.what());
  }
}

std::string system_to_json(const SystemTestEq<double>& eq) { return system_json(eq).dump(); }

SimJob parse_sim_job_json(const std::string& text) {
  const json j = parse_or_throw(text);
  SimJob job;
  auto& c = job.config;
  try {
    if (j.contains("schemes")) {
      c.schemes.clear();
      for (const auto& s : j.at("schemes")) {
        const auto parsed = parse_scheme(s.get<std::string>());
        if (!parsed) throw Error(ErrorCode::InvalidArgument, "unknown scheme " + s.get<std::string>());
        c.schemes.push_back(*parsed);
      }
    }
    c.h = j.value("h", c.h);
    c.t_end = j.value("t_end", c.t_end);
    c.batches = j.value("batches", c.batches);
    c.paths_per_batch = j.value("paths", c.paths_per_batch);
    c.seed = j.value("seed", c.seed);
    c.theta = j.value("theta", c.theta);
    c.theta_comparator = j.value("theta_comparator", c.theta_comparator);
    c.euler_comparator = j.value("euler_comparator", c.euler_comparator);
    c.threads = j.value("threads", c.threads);
    if (j.contains("system")) {
      job.system = system_from_json(j.at("system"));
    } else {
      job.scalar = ScalarTestEq<double>{complex_from_json(j.value("lambda", json(-5.0))),
                                        complex_from_json(j.value("mu", json(2.0)))};
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("invalid config JSON: ") + e.what());
  }
  c.validate();
  return job;
}

std::string sim_job_to_json(const SimJob& job) {
  const auto& c = job.config;
  json schemes = json::array();
  for (Scheme s : c.schemes) schemes.push_back(std::string(to_string(s)));
  json j = {{"schemes", schemes},
            {"h", c.h},
            {"t_end", c.t_end},
            {"batches", c.batches},
            {"paths", c.paths_per_batch},
            {"seed", c.seed},
            {"theta", c.theta},
            {"theta_comparator", c.theta_comparator},
            {"euler_comparator", c.euler_comparator},
            {"threads", c.threads}};
  if (job.system) {
    j["system"] = system_json(*job.system);
  } else if (job.scalar) {
    j["lambda"] = {job.scalar->lambda.real(), job.scalar->lambda.imag()};
    j["mu"] = {job.scalar->mu.real(), job.scalar->mu.imag()};
  }
  return j.dump(2);
}

std::complex<double> parse_complex(const std::string& token) {
  auto number = [&](const std::string& s) {
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      throw Error(ErrorCode::InvalidArgument, "not a number: " + token);
    }
    if (used != s.size() || !std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "not a number: " + token);
    return v;
  };
  const auto comma = token.find(',');
  if (comma == std::string::npos) return {number(token), 0.0};
  return {number(token.substr(0, comma)), number(token.substr(comma + 1))};
}

}  // namespace msstab
