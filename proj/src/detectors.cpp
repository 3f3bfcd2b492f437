#include "peaky/detectors.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "peaky/errors.hpp"

namespace peaky {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Below this alpha|h| the coherent statistics degenerate; the thresholds take their limits.
constexpr double kDegenerateGain = 1e-12;

void check_common(double alpha, int M, double nu) {
    if (!(alpha > 0.0)) throw DomainError("detector: alpha must be > 0");
    if (M < 1) throw DomainError("detector: M must be >= 1");
    if (!(nu > 0.0 && nu <= 1.0)) throw DomainError("detector: nu must lie in (0, 1]");
}

void check_noncoherent(double d_mag, double gamma2) {
    if (!(d_mag >= 0.0)) throw DomainError("detector: |d| must be >= 0");
    if (!(gamma2 > 0.0)) {
        throw DomainError("noncoherent detector: gamma2 must be > 0 (pure line-of-sight is not supported)");
    }
}

// ln(M (1 - nu) / nu); only called with nu < 1.
double log_prior_ratio(int M, double nu) { return std::log(M * (1.0 - nu) / nu); }

double projection(std::complex<double> y, int i, int M) {
    const double theta = 2.0 * std::numbers::pi * (i - 1) / M;
    return y.real() * std::cos(theta) + y.imag() * std::sin(theta);
}

}  // namespace

PhaseChoice nearest_phase(std::complex<double> y, int M) {
    if (y == std::complex<double>{}) return {1, 0.0};
    // The winner is the phase closest to arg y; only its neighbours can tie.
    double turns = std::arg(y) / (2.0 * std::numbers::pi);
    if (turns < 0.0) turns += 1.0;
    const int k = static_cast<int>(std::lround(turns * M)) % M;  // 0-based
    PhaseChoice best{0, -kInf};
    for (int candidate : {(k + M - 1) % M, k, (k + 1) % M}) {
        const int i = candidate + 1;
        const double p = projection(y, i, M);
        if (p > best.projection || (p == best.projection && i < best.index)) best = {i, p};
    }
    return best;
}

int strongest_bin(std::span<const double> R) {
    if (R.empty()) throw DomainError("energy vector must not be empty");
    int best = 0;
    for (std::size_t m = 1; m < R.size(); ++m) {
        if (R[m] > R[best]) best = static_cast<int>(m);
    }
    return best + 1;
}

double oopsk_coherent_threshold(double alpha, double h_mag, int M, double nu) {
    check_common(alpha, M, nu);
    if (!(h_mag >= 0.0)) throw DomainError("detector: |h| must be >= 0");
    if (nu == 1.0) return 0.0;
    const double gain = alpha * h_mag;
    if (gain < kDegenerateGain) return nu < static_cast<double>(M) / (M + 1) ? kInf : 0.0;
    const double zeta = 0.5 * gain + log_prior_ratio(M, nu) / (2.0 * gain);
    return std::max(zeta, 0.0);
}

Decision oopsk_coherent_detect(std::complex<double> y, std::complex<double> h, double alpha, int M,
                               double nu) {
    const double h_mag = std::abs(h);
    const double tau = oopsk_coherent_threshold(alpha, h_mag, M, nu);
    const std::complex<double> derotated = h_mag > 0.0 ? y * std::conj(h) / h_mag : y;
    const auto choice = nearest_phase(derotated, M);
    if (nu == 1.0 || choice.projection > tau) return {choice.index};
    return {0};
}

double oofsk_coherent_threshold(double alpha, double h_mag, int M, double nu,
                                const NumericTolerance& tol) {
    check_common(alpha, M, nu);
    if (!(h_mag >= 0.0)) throw DomainError("detector: |h| must be >= 0");
    if (nu == 1.0) return 0.0;
    const double gain2 = alpha * alpha * h_mag * h_mag;
    if (alpha * h_mag < kDegenerateGain) return nu < static_cast<double>(M) / (M + 1) ? kInf : 0.0;
    const double log_xi = log_prior_ratio(M, nu) + gain2;
    if (log_xi < 0.0) return 0.0;
    const double root = bessel_i0_inverse_log(log_xi, tol);
    return root * root / (4.0 * gain2);
}

Decision oofsk_coherent_detect(std::span<const double> R, double h_mag, double alpha, int M,
                               double nu) {
    check_common(alpha, M, nu);
    if (static_cast<int>(R.size()) != M) throw DomainError("energy vector must have M entries");
    const int best = strongest_bin(R);
    if (nu == 1.0) return {best};
    const double r_max = R[best - 1];
    const double gain = alpha * h_mag;
    if (gain < kDegenerateGain) {
        return r_max > oofsk_coherent_threshold(alpha, h_mag, M, nu) ? Decision{best} : Decision{0};
    }
    const double log_xi = log_prior_ratio(M, nu) + gain * gain;
    if (log_xi < 0.0) return r_max > 0.0 ? Decision{best} : Decision{0};
    return log_bessel_i0(2.0 * gain * std::sqrt(r_max)) > log_xi ? Decision{best} : Decision{0};
}

double oopsk_noncoherent_threshold(double alpha, double d_mag, double gamma2, int M, double nu) {
    check_common(alpha, M, nu);
    check_noncoherent(d_mag, gamma2);
    if (nu == 1.0) return 0.0;
    const double diffuse = alpha * alpha * gamma2;
    const double zeta = d_mag * d_mag / gamma2 +
                        (1.0 + 1.0 / diffuse) * (log_prior_ratio(M, nu) + std::log1p(diffuse));
    return std::max(zeta, 0.0);
}

double oofsk_noncoherent_threshold(double alpha, double d_mag, double gamma2, int M, double nu,
                                   const NumericTolerance& tol) {
    check_common(alpha, M, nu);
    check_noncoherent(d_mag, gamma2);
    tol.validate();
    if (nu == 1.0) return 0.0;
    const double diffuse = alpha * alpha * gamma2;
    const double spread = 1.0 + diffuse;
    const double los = alpha * alpha * d_mag * d_mag;
    const double log_xi = log_prior_ratio(M, nu) + std::log(spread) + los / spread;
    if (log_xi < 0.0) return 0.0;

    const double slope = diffuse / spread;
    const double bessel_scale = 2.0 * alpha * d_mag / spread;
    auto log_phi = [&](double x) { return slope * x + log_bessel_i0(bessel_scale * std::sqrt(x)); };

    // I0 >= 1 puts the root at or below log_xi / slope.
    double lo = 0.0;
    double hi = log_xi / slope;
    for (int it = 0; it < tol.max_iter; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (hi - lo <= std::max(tol.abs_tol, tol.rel_tol * mid) || mid <= lo || mid >= hi) return mid;
        (log_phi(mid) < log_xi ? lo : hi) = mid;
    }
    throw NumericError("oofsk_noncoherent_threshold: bisection did not converge");
}

NoncoherentOopskDetector::NoncoherentOopskDetector(double alpha, double d_mag, double gamma2, int M,
                                                   double nu)
    : M_(M),
      has_off_symbol_(nu < 1.0),
      tau_(oopsk_noncoherent_threshold(alpha, d_mag, gamma2, M, nu)),
      los_weight_(2.0 * d_mag / (alpha * gamma2)) {}

Decision NoncoherentOopskDetector::operator()(std::complex<double> y) const {
    const auto choice = nearest_phase(y, M_);
    if (!has_off_symbol_) return {choice.index};
    const double statistic = std::norm(y) + los_weight_ * choice.projection;
    return statistic > tau_ ? Decision{choice.index} : Decision{0};
}

NoncoherentOofskDetector::NoncoherentOofskDetector(double alpha, double d_mag, double gamma2, int M,
                                                   double nu, const NumericTolerance& tol)
    : has_off_symbol_(nu < 1.0), tau_(oofsk_noncoherent_threshold(alpha, d_mag, gamma2, M, nu, tol)) {}

Decision NoncoherentOofskDetector::operator()(std::span<const double> R) const {
    const int best = strongest_bin(R);
    if (!has_off_symbol_) return {best};
    return R[best - 1] > tau_ ? Decision{best} : Decision{0};
}

Decision oopsk_noncoherent_detect(std::complex<double> y, double alpha, double d_mag, double gamma2,
                                  int M, double nu) {
    return NoncoherentOopskDetector(alpha, d_mag, gamma2, M, nu)(y);
}

Decision oofsk_noncoherent_detect(std::span<const double> R, double alpha, double d_mag,
                                  double gamma2, int M, double nu) {
    if (static_cast<int>(R.size()) != M) throw DomainError("energy vector must have M entries");
    return NoncoherentOofskDetector(alpha, d_mag, gamma2, M, nu)(R);
}

}  // namespace peaky
