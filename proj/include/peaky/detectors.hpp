#pragma once

#include <complex>
#include <span>

#include "peaky/specfun.hpp"

namespace peaky {

/// Detected signal index; 0 is "nothing sent" (s0).
struct Decision {
    int index = 0;
    friend bool operator==(Decision, Decision) = default;
};

// Index in {1..M} of the PSK phase with the largest projection Re(y e^{-j theta_i})
// (lowest index on ties), and that projection.
struct PhaseChoice {
    int index;
    double projection;
};
PhaseChoice nearest_phase(std::complex<double> y, int M);

// Index in {1..M} of the largest energy (lowest index on ties).
int strongest_bin(std::span<const double> R);

// --- Coherent reception: the receiver knows h for every symbol. -------------

/// tau = max(zeta, 0), zeta = alpha|h|/2 + ln(M(1-nu)/nu) / (2 alpha|h|).
double oopsk_coherent_threshold(double alpha, double h_mag, int M, double nu);

/// Derotates y by the phase of h, then picks the nearest phase if its
/// projection clears the threshold and s0 otherwise.
Decision oopsk_coherent_detect(std::complex<double> y, std::complex<double> h, double alpha, int M,
                               double nu);

/// tau = [I0^{-1}(xi)]^2 / (4 alpha^2 |h|^2), xi = M(1-nu) e^{alpha^2 |h|^2} / nu,
/// and 0 when xi < 1. xi is handled in the log domain.
double oofsk_coherent_threshold(double alpha, double h_mag, int M, double nu,
                                const NumericTolerance& tol = {});

/// Energy detection. Tests R_max > tau in the equivalent form
/// ln I0(2 alpha|h| sqrt(R_max)) > ln xi, so no inversion runs per symbol.
Decision oofsk_coherent_detect(std::span<const double> R, double h_mag, double alpha, int M, double nu);

// --- Noncoherent reception: only the fading statistics (d, gamma2) are known.
// Observations must already be derotated by the phase of d.

/// tau = max(zeta, 0), zeta = |d|^2/g2 + (1 + 1/(a^2 g2)) ln((M(1-nu)/nu)(1 + a^2 g2)).
/// Throws DomainError for gamma2 == 0.
double oopsk_noncoherent_threshold(double alpha, double d_mag, double gamma2, int M, double nu);

/// tau = Phi^{-1}(xi) with Phi(x) = e^{a^2 g2 x/(1+a^2 g2)} I0(2 sqrt(x a^2 |d|^2)/(1+a^2 g2)),
/// xi = (M(1-nu)/nu)(1+a^2 g2) e^{a^2|d|^2/(1+a^2 g2)}; 0 when xi < 1.
double oofsk_noncoherent_threshold(double alpha, double d_mag, double gamma2, int M, double nu,
                                   const NumericTolerance& tol = {});

/// Noncoherent OOPSK detector with its threshold computed once.
class NoncoherentOopskDetector {
public:
    NoncoherentOopskDetector(double alpha, double d_mag, double gamma2, int M, double nu);
    Decision operator()(std::complex<double> y) const;
    double threshold() const { return tau_; }

private:
    int M_;
    bool has_off_symbol_;
    double tau_;
    double los_weight_;  // 2|d| / (alpha gamma2)
};

/// Noncoherent OOFSK detector with its threshold computed once.
class NoncoherentOofskDetector {
public:
    NoncoherentOofskDetector(double alpha, double d_mag, double gamma2, int M, double nu,
                             const NumericTolerance& tol = {});
    Decision operator()(std::span<const double> R) const;
    double threshold() const { return tau_; }

private:
    bool has_off_symbol_;
    double tau_;
};

Decision oopsk_noncoherent_detect(std::complex<double> y, double alpha, double d_mag, double gamma2,
                                  int M, double nu);
Decision oofsk_noncoherent_detect(std::span<const double> R, double alpha, double d_mag,
                                  double gamma2, int M, double nu);

}  // namespace peaky
