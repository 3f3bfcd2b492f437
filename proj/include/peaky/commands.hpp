#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "peaky/config.hpp"
#include "peaky/exponents.hpp"

namespace peaky::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

inline constexpr const char* kErrorRateHeader =
    "scheme,coherence,M,nu,K,omega,snr,ebn0_db,pe,pc_s0,pc_s1,pe_mc,mc_stderr,trials,seed";
inline constexpr const char* kExponentHeader =
    "scheme,coherence,M,nu,snr,rate_nats,exponent,rho_star,integ_stderr";

/// What is needed to regenerate a run's outputs.
struct RunManifest {
    std::string tool_version;
    std::string command;
    std::string scenario;  // canonical config JSON
    std::string sweep;
    std::uint64_t seed = 0;
    std::string timestamp;  // UTC, ISO 8601
    std::vector<std::string> output_paths;

    std::string to_json() const;
};

std::string tool_version();

/// Error-rate CSV with the analytic columns filled. When `thresholds` is not
/// null it receives a side table with the detector threshold of every row.
std::string analytic_csv(const ScenarioConfig& config, std::string* thresholds = nullptr);

/// Error-rate CSV with the simulation columns filled. Row k uses the seed
/// splitmix64(seed + k).
std::string simulate_csv(const ScenarioConfig& config, std::int64_t trials, std::uint64_t seed,
                         int workers);

/// Exponent CSV over the rate grid (nats). Without a grid in the config, the
/// grid runs from 0 to the smallest E0'(0) among the nu values, in 41 steps.
/// `e0_table` receives the (rho, E0) side table.
std::string exponent_csv(const ScenarioConfig& config, const ExponentOptions& options,
                         std::string* e0_table = nullptr);

/// Command-line entry point; returns the exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace peaky::cli
