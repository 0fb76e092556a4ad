#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "lmpred/coeffs.hpp"
#include "lmpred/experiments.hpp"
#include "lmpred/model.hpp"
#include "lmpred/simulate.hpp"

#include <json.hpp>

namespace lmpred {

using Json = nlohmann::json;

Json to_json(const ProcessSpec& spec);
/// Missing fields take defaults; unknown keys are rejected (Io error).
ProcessSpec spec_from_json(const Json& j);

Json to_json(const ExperimentConfig& config);
/// FNV-1a 64 over the compact dump of to_json(config).
std::uint64_t config_hash(const ExperimentConfig& config);

/// CSV: "# spec=<json>", "# seed=<u64>", "# method=<name>", header "x", one
/// value per row in shortest round-trip form.
void write_path_csv(std::ostream& os, const SamplePath& path);
SamplePath read_path_csv(std::istream& is);

/// "LMPRED01", n as u64 little-endian, n f64 little-endian.
void write_path_binary(std::ostream& os, std::span<const double> values);
std::vector<double> read_path_binary(std::istream& is);

/// Reads either format, sniffing the magic.
SamplePath read_path_file(const std::string& file);

void write_matrix_csv(std::ostream& os, const Eigen::MatrixXd& m);

/// Rows "j,a_jk", j = 1..k.
void write_coeffs_csv(std::ostream& os, const PredictorCoeffs& c);
Json to_json(const PredictorCoeffs& c);

/// Schema "lmpred-report/1".
Json to_json(const ExperimentReport& report);
/// Header experiment,d,n,k,K_n,statistic,value,stderr.
void write_report_csv(std::ostream& os, const ExperimentReport& report);
void write_qq_csv(std::ostream& os, const ExperimentReport& report);

/// Shortest decimal that parses back to the same double.
std::string format_double(double v);

}  // namespace lmpred
