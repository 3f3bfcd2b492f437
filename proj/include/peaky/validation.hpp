#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "peaky/analytic.hpp"

namespace peaky {

struct ValidationOptions {
    std::int64_t trials = 1'000'000;
    std::uint64_t seed = 20080601;
    int workers = 0;
    /// Relative threshold perturbation applied to the analytic side only.
    /// Nonzero values exist to show that the harness detects a wrong threshold.
    double perturb_tau = 0.0;
    /// Run a four-cell subset of the simulation grid.
    bool smoke = false;
};

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct ValidationReport {
    std::vector<CheckResult> checks;
    bool passed() const;
};

/// One cell of the analytic-vs-simulation grid.
struct GridCell {
    Scheme scheme;
    Coherence regime;
    int M;
    double nu;
    double ebn0_db;
    double K;
};

/// (scheme, regime) x M in {2, 4, 8} (plus 16 for OOFSK) x nu in {1, 0.5, 0.1}
/// x Eb/N0 in {0, 5, 10} dB x K in {0, 10}.
std::vector<GridCell> validation_grid();

/// Analytic error probability with every MAP threshold scaled by (1 + perturb).
ErrorProbabilityBreakdown error_probability_perturbed(const Scenario& scenario, double perturb,
                                                      const QuadratureTolerance& tol = {});

/// z = |pe_hat - pe| / sqrt(pe (1 - pe) / trials), with the binomial spread of
/// the analytic value so cells with no observed errors are still scored.
double binomial_z(double pe_hat, double pe, std::int64_t trials);

/// Runs the simulation grid, low-SNR limits, error floors, closed-form
/// reductions and ordering checks, writing one line per check to `log`.
ValidationReport run_validation(const ValidationOptions& options, std::ostream& log);

}  // namespace peaky
