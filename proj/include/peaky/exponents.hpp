#pragma once

#include <cstdint>
#include <memory>
#include <utility>
#include <vector>

#include "peaky/model.hpp"

namespace peaky {

/// How OOFSK E0 is integrated. Auto uses tensor quadrature for M <= 3 and
/// stratified Monte Carlo above. OOPSK always uses polar quadrature.
enum class E0Method { Auto, Quadrature, MonteCarlo };

struct ExponentOptions {
    /// Points of the reported (rho, E0) grid, equally spaced on [0, 1].
    int rho_points = 21;
    /// Chebyshev-Lobatto nodes of the E0 interpolant used for the maximization over rho.
    int interpolation_nodes = 17;
    /// Gauss-Legendre nodes of the fading-magnitude average (coherent regime).
    int fading_nodes = 32;
    E0Method method = E0Method::Auto;
    /// Monte Carlo samples for OOFSK with M > 3.
    std::int64_t mc_samples = std::int64_t{1} << 20;
    std::uint64_t mc_seed = 0x5eedULL;
    /// Width at which the golden-section search over rho stops.
    double rho_tol = 1e-6;
    /// OpenMP threads; 0 uses the runtime default.
    int workers = 0;
    /// Run every kernel on the calling thread (reference path).
    bool serial = false;
};

struct E0Estimate {
    double value = 0.0;
    /// Standard error of the integration; 0 for quadrature.
    double std_error = 0.0;
};

/// E(R) at one rate, in nats per symbol.
struct ExponentPoint {
    double rate = 0.0;
    double exponent = 0.0;
    double rho_star = 0.0;
};

struct ExponentCurve {
    std::vector<ExponentPoint> points;
    std::vector<std::pair<double, double>> e0_grid;
    double integration_stderr = 0.0;
};

/// Gallager E0 at each rho, conditioned on a fading magnitude |h| (coherent
/// regime) or for the noncoherent law of the scenario. For a coherent scenario
/// the fading-magnitude average of E0(rho, h) is returned.
std::vector<E0Estimate> e0_batch(const std::vector<double>& rhos, const Scenario& scenario,
                                 const ExponentOptions& options = {});
std::vector<E0Estimate> e0_batch_given_h(const std::vector<double>& rhos, const Scenario& scenario,
                                         double h_mag, const ExponentOptions& options = {});

E0Estimate e0(double rho, const Scenario& scenario, const ExponentOptions& options = {});

/// E0 interpolants for one scenario (one per fading node when coherent),
/// built once and reused for every rate.
class ExponentModel {
public:
    explicit ExponentModel(const Scenario& scenario, const ExponentOptions& options = {});

    /// E(R) on an increasing rate grid; see exponent_curve.
    ExponentCurve curve(const std::vector<double>& rates) const;
    /// Slope E0'(0) of the interpolant (fading-averaged when coherent).
    double slope_at_zero() const;
    /// Smallest rate from which E(R) = 0. Equals slope_at_zero() for a single
    /// channel law; for coherent reception it is the largest per-|h| slope.
    double zero_exponent_rate() const;

    struct Tables;

private:
    std::shared_ptr<const Tables> tables_;
    ExponentOptions options_;
};

/// sup over rho in [0, 1] of E0(rho) - rho R. Coherent scenarios return the
/// fading average of E(R, h) with the average maximizer as rho_star.
ExponentPoint error_exponent(double rate, const Scenario& scenario,
                             const ExponentOptions& options = {});

/// E(R) on an increasing rate grid, from one cached E0 interpolant per channel law.
ExponentCurve exponent_curve(const std::vector<double>& rates, const Scenario& scenario,
                             const ExponentOptions& options = {});

/// Slope E0'(0) of the E0 interpolant (fading-averaged when coherent). For a
/// single channel law E(R) = 0 for every R at or above it.
double e0_slope_at_zero(const Scenario& scenario, const ExponentOptions& options = {});

/// n equally spaced points on [0, 1].
std::vector<double> rho_grid(int n);

}  // namespace peaky
