#pragma once

#include <cstdint>

namespace peaky {

struct NumericTolerance {
    double abs_tol = 1e-12;
    double rel_tol = 1e-10;
    int max_iter = 200;

    void validate() const;
};

/// Upper tail of the standard normal, P(N(0,1) > x).
double gaussian_q(double x);

/// e^{-x} I0(x) for x >= 0. Lies in (0, 1] and decreases with x.
double bessel_i0_scaled(double x);

/// ln I0(x) for x >= 0, accurate for tiny x (where it behaves like x^2/4)
/// and for arguments far beyond the overflow point of I0 itself.
double log_bessel_i0(double x);

/// Inverse of I0 on [1, inf). Bracketed on [ln y, u] and bisected.
double bessel_i0_inverse(double y, const NumericTolerance& tol = {});

/// Same as bessel_i0_inverse but takes ln y, so y may exceed the double range.
double bessel_i0_inverse_log(double log_y, const NumericTolerance& tol = {});

/// First-order Marcum Q function
///   Q1(a, b) = int_b^inf x exp(-(x^2 + a^2)/2) I0(a x) dx.
///
/// Evaluated as the Poisson mixture of central chi-square tails
/// (the noncentral chi-square series), summed outward from the Poisson
/// mode in the log domain so that large a does not underflow the weights.
double marcum_q1(double a, double b);

/// Source entropy in bits of an on-off constellation:
/// H = nu log2(M/nu) + (1-nu) log2(1/(1-nu)).
double source_entropy(int M, double nu);

// Poisson helpers shared with the Marcum series. Exposed for testing.
double log_poisson_pmf(std::int64_t k, double mean);
double log_poisson_cdf(std::int64_t k, double mean);

/// ln(e^a + e^b) without overflow; -inf operands are allowed.
double log_add_exp(double a, double b);

}  // namespace peaky
