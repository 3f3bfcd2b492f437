#include "peaky/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "peaky/errors.hpp"

namespace peaky {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Above this argument the asymptotic expansion of e^{-x} I0(x) converges to
// double precision before its terms start growing again.
constexpr double kI0AsymptoticFrom = 25.0;

// Sum_{k>=1} (x/2)^{2k} / (k!)^2, i.e. I0(x) - 1. All terms are positive.
double i0_series_minus_one(double x) {
    const double q = 0.25 * x * x;
    double term = 1.0;
    double sum = 0.0;
    for (int k = 1; k < 500; ++k) {
        term *= q / (static_cast<double>(k) * k);
        sum += term;
        if (term < 1e-17 * sum) break;
    }
    return sum;
}

// sqrt(2 pi x) e^{-x} I0(x) for large x.
double i0_asymptotic_sum(double x) {
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k < 200; ++k) {
        const double next = term * (2.0 * k - 1.0) * (2.0 * k - 1.0) / (8.0 * k * x);
        if (next > term) break;  // divergent tail of the asymptotic series
        term = next;
        sum += term;
        if (term < 1e-17 * sum) break;
    }
    return sum;
}

// Error of Stirling's approximation, ln n! - (n + 1/2) ln n + n - ln sqrt(2 pi).
double stirling_error(double n) {
    constexpr double s0 = 1.0 / 12.0;
    constexpr double s1 = 1.0 / 360.0;
    constexpr double s2 = 1.0 / 1260.0;
    constexpr double s3 = 1.0 / 1680.0;
    constexpr double s4 = 1.0 / 1188.0;
    if (n <= 15.0) {
        return std::lgamma(n + 1.0) - (n + 0.5) * std::log(n) + n -
               0.5 * std::log(2.0 * std::numbers::pi);
    }
    const double nn = n * n;
    if (n > 500) return (s0 - s1 / nn) / n;
    if (n > 80) return (s0 - (s1 - s2 / nn) / nn) / n;
    if (n > 35) return (s0 - (s1 - (s2 - s3 / nn) / nn) / nn) / n;
    return (s0 - (s1 - (s2 - (s3 - s4 / nn) / nn) / nn) / nn) / n;
}

// Deviance term k ln(k/m) + m - k, computed without cancellation near k = m.
double poisson_deviance(double k, double m) {
    if (std::abs(k - m) < 0.1 * (k + m)) {
        double v = (k - m) / (k + m);
        double s = (k - m) * v;
        double ej = 2.0 * k * v;
        v *= v;
        for (int j = 1; j < 1000; ++j) {
            ej *= v;
            const double s1 = s + ej / (2 * j + 1);
            if (s1 == s) return s1;
            s = s1;
        }
        return s;
    }
    return k * std::log(k / m) + m - k;
}

}  // namespace

void NumericTolerance::validate() const {
    if (!(abs_tol > 0.0) || !(rel_tol > 0.0) || max_iter < 1) {
        throw DomainError("NumericTolerance: abs_tol, rel_tol must be > 0 and max_iter >= 1");
    }
}

double gaussian_q(double x) {
    if (!std::isfinite(x)) throw DomainError("gaussian_q: argument must be finite");
    return 0.5 * std::erfc(x / std::numbers::sqrt2);
}

double bessel_i0_scaled(double x) {
    if (!(x >= 0.0)) throw DomainError("bessel_i0_scaled: argument must be >= 0");
    if (std::isinf(x)) return 0.0;
    if (x < kI0AsymptoticFrom) return std::exp(-x) * (1.0 + i0_series_minus_one(x));
    return i0_asymptotic_sum(x) / std::sqrt(2.0 * std::numbers::pi * x);
}

double log_bessel_i0(double x) {
    if (!(x >= 0.0)) throw DomainError("log_bessel_i0: argument must be >= 0");
    if (std::isinf(x)) return kInf;
    if (x < kI0AsymptoticFrom) return std::log1p(i0_series_minus_one(x));
    return x - 0.5 * std::log(2.0 * std::numbers::pi * x) + std::log(i0_asymptotic_sum(x));
}

double bessel_i0_inverse(double y, const NumericTolerance& tol) {
    if (!(y >= 1.0)) throw DomainError("bessel_i0_inverse: argument must be >= 1");
    return bessel_i0_inverse_log(std::log(y), tol);
}

double bessel_i0_inverse_log(double log_y, const NumericTolerance& tol) {
    tol.validate();
    if (!(log_y >= 0.0)) throw DomainError("bessel_i0_inverse_log: argument must be >= 0");
    if (std::isinf(log_y)) return kInf;
    if (log_y == 0.0) return 0.0;

    // ln I0(x) <= x, so the root is never below ln y.
    double lo = log_y;
    double hi = log_y + 1.0;
    int iter = 0;
    while (log_bessel_i0(hi) < log_y) {
        lo = hi;
        hi *= 2.0;
        if (++iter > tol.max_iter) throw NumericError("bessel_i0_inverse: bracketing failed");
    }

    const double residual_tol = 0.5 * tol.rel_tol * std::max(1.0, log_y);
    for (int it = 0; it < tol.max_iter; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double g = log_bessel_i0(mid) - log_y;
        const bool narrow = (hi - lo) <= std::max(tol.abs_tol, tol.rel_tol * mid);
        if ((std::abs(g) <= residual_tol && narrow) || mid <= lo || mid >= hi) return mid;
        if (g < 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    throw NumericError("bessel_i0_inverse: bisection did not converge");
}

double log_add_exp(double a, double b) {
    if (a == -kInf) return b;
    if (b == -kInf) return a;
    return a > b ? a + std::log1p(std::exp(b - a)) : b + std::log1p(std::exp(a - b));
}

double log_poisson_pmf(std::int64_t k, double mean) {
    if (k < 0) return -kInf;
    if (mean == 0.0) return k == 0 ? 0.0 : -kInf;
    if (k == 0) return -mean;
    const auto kd = static_cast<double>(k);
    return -0.5 * std::log(2.0 * std::numbers::pi * kd) - stirling_error(kd) -
           poisson_deviance(kd, mean);
}

double log_poisson_cdf(std::int64_t k, double mean) {
    if (k < 0) return -kInf;
    if (mean == 0.0) return 0.0;
    const auto kd = static_cast<double>(k);
    if (kd < mean) {
        // Terms increase up to j = k; sum downward relative to the largest.
        double term = 1.0;
        double sum = 1.0;
        for (std::int64_t j = k; j > 0; --j) {
            term *= static_cast<double>(j) / mean;
            sum += term;
            if (term < 1e-17 * sum) break;
        }
        return log_poisson_pmf(k, mean) + std::log(sum);
    }
    // Near one: take the complement of the upper tail.
    double term = 1.0;
    double sum = 1.0;
    for (std::int64_t j = k + 2;; ++j) {
        term *= mean / static_cast<double>(j);
        sum += term;
        if (term < 1e-17 * sum) break;
    }
    const double log_tail = log_poisson_pmf(k + 1, mean) + std::log(sum);
    return std::log1p(-std::exp(log_tail));
}

double marcum_q1(double a, double b) {
    if (!(a >= 0.0) || !(b >= 0.0)) throw DomainError("marcum_q1: arguments must be >= 0");
    if (b == 0.0) return 1.0;
    if (std::isinf(b)) return 0.0;
    if (std::isinf(a)) return 1.0;

    const double lambda = 0.5 * a * a;
    const double x = 0.5 * b * b;
    if (lambda == 0.0) return std::exp(-x);

    // Q1 = sum_k Pois(k; lambda) P(Pois(x) <= k). Weights below the mode by
    // more than 9 standard deviations carry under 1e-17 of the total.
    const double start = std::floor(lambda - 9.0 * std::sqrt(lambda) - 10.0);
    std::int64_t k = start > 0.0 ? static_cast<std::int64_t>(start) : 0;

    double log_cdf = log_poisson_cdf(k, x);
    double log_sum = -kInf;
    constexpr double kLogTruncation = -36.8413614879047;  // ln 1e-16
    constexpr std::int64_t kMaxTerms = 100'000'000;
    for (std::int64_t n = 0; n < kMaxTerms; ++n, ++k) {
        log_sum = log_add_exp(log_sum, log_poisson_pmf(k, lambda) + log_cdf);
        const double ratio = lambda / static_cast<double>(k + 2);
        if (ratio < 1.0) {
            // Remaining weights are bounded by a geometric series, and each is
            // multiplied by a CDF value <= 1.
            const double log_tail = log_poisson_pmf(k + 1, lambda) - std::log1p(-ratio);
            if (log_tail < std::max(log_sum, -745.0) + kLogTruncation) {
                return std::min(1.0, std::exp(log_sum));
            }
        }
        log_cdf = std::min(0.0, log_add_exp(log_cdf, log_poisson_pmf(k + 1, x)));
    }
    throw NumericError("marcum_q1: series did not converge");
}

double source_entropy(int M, double nu) {
    if (M < 1) throw DomainError("source_entropy: M must be >= 1");
    if (!(nu > 0.0 && nu <= 1.0)) throw DomainError("source_entropy: nu must lie in (0, 1]");
    const double on = nu * std::log2(static_cast<double>(M) / nu);
    const double off = nu < 1.0 ? -(1.0 - nu) * std::log2(1.0 - nu) : 0.0;
    return on + off;
}

}  // namespace peaky
