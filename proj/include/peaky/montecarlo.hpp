#pragma once

#include <cstdint>

#include "peaky/model.hpp"

namespace peaky {

/// Symbols per chunk. Random streams are keyed by (seed, chunk * kChunkSize + j).
inline constexpr std::int64_t kChunkSize = std::int64_t{1} << 16;

struct SimulationOptions {
    /// OpenMP threads; 0 uses the runtime default.
    int workers = 0;
    /// Multiplies the noise; 0 gives the noiseless diagnostic channel.
    double noise_scale = 1.0;
};

struct SimulationResult {
    std::int64_t trials = 0;
    std::int64_t errors = 0;
    double pe_hat = 0.0;
    /// Binomial standard error sqrt(pe_hat (1 - pe_hat) / trials).
    double std_error = 0.0;
    std::uint64_t seed = 0;
    std::int64_t worker_chunks = 0;

    // Diagnostics for the prior and energy checks.
    std::int64_t off_sent = 0;
    std::int64_t off_errors = 0;
    /// Sum of transmitted |alpha e^{j theta_i}|^2 over all symbols.
    double energy_sum = 0.0;

    friend bool operator==(const SimulationResult&, const SimulationResult&) = default;
};

/// Simulates `trials` symbols over the discrete channel and counts symbol
/// errors of the MAP detector. Chunks run in parallel under OpenMP; the result
/// does not depend on the worker count.
SimulationResult simulate(const Scenario& scenario, std::int64_t trials, std::uint64_t seed,
                          const SimulationOptions& options = {});

/// Single-threaded reference with the same per-chunk kernel.
SimulationResult simulate_serial(const Scenario& scenario, std::int64_t trials, std::uint64_t seed,
                                 const SimulationOptions& options = {});

}  // namespace peaky
