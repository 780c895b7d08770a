#pragma once

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "qroofs/decomposition.hpp"
#include "qroofs/experiments.hpp"
#include "qroofs/hermitian.hpp"
#include "qroofs/sdp/conic.hpp"

#ifndef QROOFS_BUILD_ID
#define QROOFS_BUILD_ID "unknown"
#endif

namespace qroofs::io {

using json = nlohmann::json;

inline const char* build_id() { return QROOFS_BUILD_ID; }

// Shared matrix format: {"dim": n, "entries": [[re, im], ...]} row-major.
inline json matrix_to_json(const Matrix& m) {
  json entries = json::array();
  for (int r = 0; r < m.rows(); ++r) {
    for (int c = 0; c < m.cols(); ++c) {
      entries.push_back(json::array({m(r, c).real(), m(r, c).imag()}));
    }
  }
  return json{{"dim", m.rows()}, {"entries", std::move(entries)}};
}

inline Complex complex_from_json(const json& j, const char* what) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    std::ostringstream msg;
    msg << what << ": each entry must be a [re, im] number pair";
    throw std::invalid_argument(msg.str());
  }
  return Complex(j[0].get<double>(), j[1].get<double>());
}

inline Matrix matrix_from_json(const json& j) {
  if (!j.is_object() || !j.contains("dim") || !j.contains("entries")) {
    throw std::invalid_argument("matrix json needs \"dim\" and \"entries\" fields");
  }
  if (!j["dim"].is_number_integer() || j["dim"].get<int>() < 1) {
    throw std::invalid_argument("matrix json: \"dim\" must be a positive integer");
  }
  const int dim = j["dim"].get<int>();
  const json& entries = j["entries"];
  if (!entries.is_array() || static_cast<int>(entries.size()) != dim * dim) {
    std::ostringstream msg;
    msg << "matrix json: expected " << dim * dim << " entries, got "
        << entries.size();
    throw std::invalid_argument(msg.str());
  }
  Matrix m(dim, dim);
  for (int r = 0; r < dim; ++r) {
    for (int c = 0; c < dim; ++c) {
      m(r, c) = complex_from_json(entries[r * dim + c], "matrix json");
    }
  }
  return m;
}

inline json parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("could not open '" + path + "'");
  }
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) {
    throw std::invalid_argument("could not parse '" + path + "' as JSON");
  }
  return j;
}

inline Matrix load_matrix(const std::string& path) {
  try {
    return matrix_from_json(parse_file(path));
  } catch (const std::invalid_argument& error) {
    throw std::invalid_argument(std::string(error.what()) + " (" + path + ")");
  }
}

// Decomposition format: {"weights": [...], "states": [[[re, im], ...], ...]}.
inline json decomposition_to_json(const PureDecomposition& decomposition) {
  json weights = json::array();
  json states = json::array();
  for (int k = 0; k < decomposition.size(); ++k) {
    weights.push_back(decomposition.weight(k));
    json state = json::array();
    const Vector& psi = decomposition.state(k);
    for (int i = 0; i < psi.size(); ++i) {
      state.push_back(json::array({psi(i).real(), psi(i).imag()}));
    }
    states.push_back(std::move(state));
  }
  return json{{"weights", std::move(weights)}, {"states", std::move(states)}};
}

inline PureDecomposition decomposition_from_json(const json& j) {
  if (!j.is_object() || !j.contains("weights") || !j.contains("states")) {
    throw std::invalid_argument(
        "decomposition json needs \"weights\" and \"states\" fields");
  }
  const json& jw = j["weights"];
  const json& js = j["states"];
  if (!jw.is_array() || !js.is_array() || jw.size() != js.size() || jw.empty()) {
    throw std::invalid_argument(
        "decomposition json: weights and states must be equal-length nonempty arrays");
  }
  std::vector<double> weights;
  std::vector<Vector> states;
  for (size_t k = 0; k < jw.size(); ++k) {
    if (!jw[k].is_number()) {
      throw std::invalid_argument("decomposition json: weights must be numbers");
    }
    weights.push_back(jw[k].get<double>());
    const json& state = js[k];
    if (!state.is_array() || state.empty()) {
      throw std::invalid_argument("decomposition json: each state must be a nonempty array");
    }
    Vector psi(state.size());
    for (size_t i = 0; i < state.size(); ++i) {
      psi(static_cast<int>(i)) = complex_from_json(state[i], "decomposition json");
    }
    states.push_back(std::move(psi));
  }
  return PureDecomposition(std::move(weights), std::move(states));
}

inline std::string bound_label(BoundKind kind, int extension) {
  if (kind == BoundKind::sppt) return "sppt";
  std::ostringstream out;
  out << "se" << extension;
  return out.str();
}

inline json config_to_json(const TrialConfig& config) {
  return json{{"d", config.local_dim},
              {"bound", bound_label(config.kind, config.extension)},
              {"zero_diagonal", config.zero_diagonal},
              {"trials", config.trials},
              {"seed", config.seed},
              {"tolerance", config.tolerance}};
}

inline json trial_record_to_json(const TrialRecord& record) {
  json j{{"index", record.index},
         {"qfi", record.qfi_value},
         {"degenerate", record.degenerate},
         {"failed", record.failed},
         {"status", sdp::to_string(record.status)}};
  j["bound"] = std::isfinite(record.bound_value) ? json(record.bound_value) : json();
  j["relative_difference"] = std::isfinite(record.relative_difference)
                                 ? json(record.relative_difference)
                                 : json();
  return j;
}

inline TrialRecord trial_record_from_json(const json& j) {
  TrialRecord record;
  record.index = j.at("index").get<int>();
  record.qfi_value = j.at("qfi").get<double>();
  record.bound_value = j.at("bound").is_null()
                           ? std::numeric_limits<double>::quiet_NaN()
                           : j.at("bound").get<double>();
  record.relative_difference = j.at("relative_difference").is_null()
                                   ? std::numeric_limits<double>::quiet_NaN()
                                   : j.at("relative_difference").get<double>();
  record.degenerate = j.at("degenerate").get<bool>();
  record.failed = j.at("failed").get<bool>();
  const std::string status = j.at("status").get<std::string>();
  if (status == "optimal") {
    record.status = sdp::SolveStatus::optimal;
  } else if (status == "infeasible") {
    record.status = sdp::SolveStatus::infeasible;
  } else {
    record.status = sdp::SolveStatus::max_iterations;
  }
  return record;
}

inline json summary_to_json(const StatsSummary& summary) {
  return json{{"largest", summary.largest},
              {"average", summary.average},
              {"stddev", summary.stddev},
              {"counted", summary.counted},
              {"degenerate", summary.degenerate_count},
              {"failures", summary.failure_count}};
}

inline json table_to_json(const TableResult& result) {
  return json{{"config", config_to_json(result.config)},
              {"summary", summary_to_json(result.summary)},
              {"build", build_id()}};
}

inline json conjecture_to_json(const ConjectureReport& report) {
  return json{{"trials", report.trials},
              {"guaranteed_violations", report.guaranteed_violations},
              {"degenerate", report.degenerate_count},
              {"smallest_surplus", report.smallest_surplus},
              {"largest_surplus", report.largest_surplus},
              {"average_surplus", report.average_surplus},
              {"build", build_id()}};
}

namespace detail {

inline std::string csv_number(double value) {
  if (!std::isfinite(value)) return "nan";
  std::ostringstream out;
  out.precision(17);
  out << value;
  return out.str();
}

}  // namespace detail

inline std::string records_to_csv(const std::vector<TrialRecord>& records) {
  std::ostringstream out;
  out << "index,qfi,bound,relative_difference,degenerate,failed,status\n";
  for (const auto& record : records) {
    out << record.index << ',' << detail::csv_number(record.qfi_value) << ','
        << detail::csv_number(record.bound_value) << ','
        << detail::csv_number(record.relative_difference) << ','
        << (record.degenerate ? 1 : 0) << ',' << (record.failed ? 1 : 0) << ','
        << sdp::to_string(record.status) << '\n';
  }
  return out.str();
}

inline std::string summary_to_csv(const TableResult& result) {
  std::ostringstream out;
  out << "d,bound,zero_diagonal,trials,seed,tolerance,largest,average,stddev,"
         "counted,degenerate,failures,build\n";
  const TrialConfig& config = result.config;
  const StatsSummary& summary = result.summary;
  out << config.local_dim << ',' << bound_label(config.kind, config.extension)
      << ',' << (config.zero_diagonal ? 1 : 0) << ',' << config.trials << ','
      << config.seed << ',' << detail::csv_number(config.tolerance) << ','
      << detail::csv_number(summary.largest) << ','
      << detail::csv_number(summary.average) << ','
      << detail::csv_number(summary.stddev) << ',' << summary.counted << ','
      << summary.degenerate_count << ',' << summary.failure_count << ','
      << build_id() << '\n';
  return out.str();
}

inline void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path);
  if (!out) {
    throw std::invalid_argument("could not open '" + path + "' for writing");
  }
  out << contents;
}

}  // namespace qroofs::io
