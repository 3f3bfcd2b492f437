#pragma once

#include <functional>

#include "peaky/model.hpp"
#include "peaky/quadrature.hpp"

namespace peaky {

/// P_e together with the conditional correct-detection probabilities.
/// pe = 1 - ((1 - nu) pc_s0 + nu pc_s1); pc_s0 is 1 when nu = 1.
struct ErrorProbabilityBreakdown {
    double pe = 0.0;
    double pc_s0 = 1.0;
    double pc_s1 = 1.0;
};

/// Builds a breakdown from the conditional error probabilities of s0 and s1.
ErrorProbabilityBreakdown breakdown_from_errors(double nu, double pe_s0, double pe_s1);

// --- Coherent, conditioned on the fading magnitude |h| ----------------------

ErrorProbabilityBreakdown pe_oopsk_coherent_given_h(double h_mag, double alpha, int M, double nu,
                                                    const QuadratureTolerance& tol = {});
/// Same expressions with an arbitrary (not necessarily MAP) threshold.
ErrorProbabilityBreakdown pe_oopsk_coherent_at_threshold(double h_mag, double alpha, int M, double nu,
                                                         double tau,
                                                         const QuadratureTolerance& tol = {});

/// How the OOFSK correct-detection probability of s1 is evaluated.
/// Auto uses the alternating Marcum-Q sum up to M = 16 and the integral above.
enum class OofskMethod { Auto, AlternatingSum, Integral };

ErrorProbabilityBreakdown pe_oofsk_coherent_given_h(double h_mag, double alpha, int M, double nu,
                                                    const QuadratureTolerance& tol = {},
                                                    OofskMethod method = OofskMethod::Auto);
ErrorProbabilityBreakdown pe_oofsk_coherent_at_threshold(double h_mag, double alpha, int M, double nu,
                                                         double tau,
                                                         const QuadratureTolerance& tol = {},
                                                         OofskMethod method = OofskMethod::Auto);

// --- Noncoherent Rician fading ---------------------------------------------

/// Sign of the circular-cap term in P(correct | s0) for noncoherent OOPSK.
/// Plus is the decision-region probability; Minus reproduces the literal
/// printed expression and exists for comparison only.
enum class CapSign { Plus, Minus };

ErrorProbabilityBreakdown pe_oopsk_noncoherent(double alpha, double d_mag, double gamma2, int M,
                                               double nu, const QuadratureTolerance& tol = {});
ErrorProbabilityBreakdown pe_oopsk_noncoherent_at_threshold(double alpha, double d_mag, double gamma2,
                                                            int M, double nu, double tau,
                                                            const QuadratureTolerance& tol = {},
                                                            CapSign sign = CapSign::Plus);

ErrorProbabilityBreakdown pe_oofsk_noncoherent(double alpha, double d_mag, double gamma2, int M,
                                               double nu, const QuadratureTolerance& tol = {},
                                               OofskMethod method = OofskMethod::Auto);
ErrorProbabilityBreakdown pe_oofsk_noncoherent_at_threshold(double alpha, double d_mag, double gamma2,
                                                            int M, double nu, double tau,
                                                            const QuadratureTolerance& tol = {},
                                                            OofskMethod method = OofskMethod::Auto);

// --- Fading average and asymptotes -----------------------------------------

/// Number of Gauss-Legendre nodes used for fading averages.
inline constexpr int kFadingAverageNodes = 128;

/// int_0^inf g(r) f_|h|(r) dr by Gauss-Legendre on [0, r_max], where the Rician
/// tail beyond r_max is below 1e-12. A pure line-of-sight law evaluates g(|d|).
double average_over_fading(const std::function<double(double)>& g, const FadingSpec& fading,
                           int nodes = kFadingAverageNodes);
ErrorProbabilityBreakdown average_over_fading(
    const std::function<ErrorProbabilityBreakdown(double)>& given_h, const FadingSpec& fading,
    int nodes = kFadingAverageNodes);

/// Limit of P(correct | s1) for noncoherent OOPSK as SNR -> inf; depends on K and M only.
double oopsk_noncoherent_correct_limit(double K, int M, const QuadratureTolerance& tol = {});
/// High-SNR error floor nu (1 - P_{c,inf|s1}) of noncoherent OOPSK.
double oopsk_noncoherent_error_floor(double K, int M, double nu, const QuadratureTolerance& tol = {});

/// Error probability of a full scenario (coherent cases averaged over |h|).
ErrorProbabilityBreakdown error_probability(const Scenario& scenario,
                                            const QuadratureTolerance& tol = {});

/// Detector threshold for reporting: the noncoherent threshold, or for
/// coherent reception the threshold at |h| = sqrt(Omega).
double reference_threshold(const Scenario& scenario);

}  // namespace peaky
