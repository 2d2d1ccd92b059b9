#pragma once

#include <string>

#include <json.hpp>

#include "bmsdp/certificates.hpp"
#include "bmsdp/experiments.hpp"
#include "bmsdp/planted.hpp"
#include "bmsdp/theory.hpp"
#include "bmsdp/two_phase.hpp"

namespace bmsdp {

using Json = nlohmann::json;

// Instance JSON: {"n":, "m":, "C":[svec], "A":[[svec]...], "b":[...], "meta":{}}
// with the svec convention (row-major upper triangle, sqrt(2) off-diagonals).
// Round-trips bit-exactly.
Json instance_to_json(const SdpInstance& inst, Json meta = Json::object());
SdpInstance instance_from_json(const Json& j);

// Planted instances ride in meta.planted (X0/S0 as svec, lambda0, r).
Json planted_to_json(const PlantedInstance& planted);
PlantedInstance planted_from_json(const Json& j);

// Flat report object with the documented residual keys and verdict.
Json report_to_json(const CertificateReport& rep);

Json bound_result_to_json(const BoundResult& r);
BoundQuery bound_query_from_json(const Json& j);

Json factor_to_json(const FactorPoint& Y);
FactorPoint factor_from_json(const Json& j);

// Columns: k,case,t_k,mu,nu,inner_iters,grad_norm,min_eig
std::string trace_to_csv(const std::vector<PhaseTraceRow>& trace);

// Columns: r,p,trials,successes,rate,mean_runtime,mean_inner_iters
std::string phase_transition_to_csv(const std::vector<PhaseTransitionRow>& rows);

// Columns: sigma,trials,successes,rate,mean_runtime,mean_inner_iters
std::string smoothing_rates_to_csv(const std::vector<SmoothingRow>& rows);

// Columns: sigma,iter,mean_resid,std_resid,count
std::string smoothing_trace_to_csv(const std::vector<SmoothingTraceStat>& stats);

// Shortest round-trip decimal formatting ('.' decimal point, locale-free).
std::string format_double(double v);

ExperimentConfig experiment_config_from_json(const Json& j);

void write_file(const std::string& path, const std::string& contents);
std::string read_file(const std::string& path);

}  // namespace bmsdp
