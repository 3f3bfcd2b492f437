#include "peaky/model.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "peaky/errors.hpp"
#include "peaky/specfun.hpp"

namespace peaky {

std::string to_string(Scheme s) { return s == Scheme::Oopsk ? "oopsk" : "oofsk"; }

std::string to_string(Coherence c) {
    return c == Coherence::Coherent ? "coherent" : "noncoherent";
}

Scheme parse_scheme(const std::string& text) {
    if (text == "oopsk" || text == "OOPSK") return Scheme::Oopsk;
    if (text == "oofsk" || text == "OOFSK") return Scheme::Oofsk;
    throw DomainError("unknown scheme '" + text + "' (expected oopsk|oofsk)");
}

Coherence parse_coherence(const std::string& text) {
    if (text == "coherent") return Coherence::Coherent;
    if (text == "noncoherent") return Coherence::Noncoherent;
    throw DomainError("unknown regime '" + text + "' (expected coherent|noncoherent)");
}

ModulationSpec::ModulationSpec(Scheme scheme, int M, double nu) : scheme_(scheme), M_(M), nu_(nu) {
    if (scheme == Scheme::Oopsk && M < 2) throw DomainError("OOPSK requires M >= 2");
    if (scheme == Scheme::Oofsk && M < 1) throw DomainError("OOFSK requires M >= 1");
    if (!(nu > 0.0 && nu <= 1.0)) throw DomainError("duty cycle nu must lie in (0, 1]");
}

std::vector<double> ModulationSpec::priors() const {
    std::vector<double> p(M_ + 1, on_prior());
    p[0] = off_prior();
    return p;
}

double ModulationSpec::phase(int i) const {
    if (i < 1 || i > M_) throw DomainError("signal index out of range");
    return 2.0 * std::numbers::pi * (i - 1) / M_;
}

FadingSpec::FadingSpec(Coherence regime, double d_mag, double gamma2)
    : regime_(regime), d_mag_(d_mag), gamma2_(gamma2) {
    if (!(d_mag >= 0.0) || !(gamma2 >= 0.0) || !std::isfinite(d_mag) || !std::isfinite(gamma2)) {
        throw DomainError("fading: |d| and gamma2 must be finite and >= 0");
    }
    if (!(d_mag * d_mag + gamma2 > 0.0)) throw DomainError("fading: |d|^2 + gamma2 must be > 0");
}

FadingSpec FadingSpec::from_rician(Coherence regime, double K, double omega) {
    if (!(K >= 0.0)) throw DomainError("fading: K must be >= 0");
    if (!(omega > 0.0) || !std::isfinite(omega)) throw DomainError("fading: Omega must be > 0");
    if (std::isinf(K)) return FadingSpec(regime, std::sqrt(omega), 0.0);
    return FadingSpec(regime, std::sqrt(K * omega / (1.0 + K)), omega / (1.0 + K));
}

double FadingSpec::rician_k() const {
    if (gamma2_ == 0.0) return std::numeric_limits<double>::infinity();
    return d_mag_ * d_mag_ / gamma2_;
}

LinkOperatingPoint LinkOperatingPoint::from_snr(double snr, const ModulationSpec& spec) {
    return {snr, alpha_from_snr(snr, spec), ebn0_from_snr(snr, spec)};
}

LinkOperatingPoint LinkOperatingPoint::from_ebn0(double ebn0, const ModulationSpec& spec) {
    return from_snr(snr_from_ebn0(ebn0, spec), spec);
}

double alpha_from_snr(double snr, const ModulationSpec& spec) {
    if (!(snr > 0.0) || !std::isfinite(snr)) throw DomainError("snr must be finite and > 0");
    return std::sqrt(snr / spec.nu());
}

double ebn0_from_snr(double snr, const ModulationSpec& spec) {
    if (!(snr > 0.0) || !std::isfinite(snr)) throw DomainError("snr must be finite and > 0");
    const double h = source_entropy(spec.M(), spec.nu());
    if (!(h > 0.0)) throw DomainError("source entropy is zero; Eb/N0 undefined");
    return snr / h;
}

double snr_from_ebn0(double ebn0, const ModulationSpec& spec) {
    if (!(ebn0 > 0.0) || !std::isfinite(ebn0)) throw DomainError("Eb/N0 must be finite and > 0");
    const double h = source_entropy(spec.M(), spec.nu());
    if (!(h > 0.0)) throw DomainError("source entropy is zero; Eb/N0 undefined");
    return ebn0 * h;
}

double to_db(double ratio) { return 10.0 * std::log10(ratio); }
double from_db(double db) { return std::pow(10.0, db / 10.0); }

double log_fading_magnitude_pdf(double r, const FadingSpec& fading) {
    if (!(r >= 0.0)) throw DomainError("fading_magnitude_pdf: r must be >= 0");
    if (fading.gamma2() == 0.0) throw DomainError("fading_magnitude_pdf: pure-LOS law has no density");
    if (r == 0.0) return -std::numeric_limits<double>::infinity();
    const double K = fading.rician_k();
    const double omega = fading.omega();
    return std::log(2.0 * r * (1.0 + K) / omega) - K - (1.0 + K) * r * r / omega +
           log_bessel_i0(2.0 * r * std::sqrt(K * (1.0 + K) / omega));
}

double fading_magnitude_pdf(double r, const FadingSpec& fading) {
    return std::exp(log_fading_magnitude_pdf(r, fading));
}

double fading_magnitude_upper(const FadingSpec& fading, double tail) {
    if (!(tail > 0.0 && tail < 1.0)) throw DomainError("tail mass must lie in (0, 1)");
    if (fading.gamma2() == 0.0) return fading.d_mag();
    const double K = fading.rician_k();
    const double omega = fading.omega();
    // |h| sqrt(2(1+K)/Omega) is Rice distributed with noncentrality sqrt(2K).
    const double scale = std::sqrt(2.0 * (1.0 + K) / omega);
    const double a = std::sqrt(2.0 * K);
    if (K == 0.0) return std::sqrt(-std::log(tail)) * std::sqrt(omega);
    double lo = a, hi = a + 4.0;
    while (marcum_q1(a, hi) > tail) {
        lo = hi;
        hi *= 2.0;
    }
    for (int it = 0; it < 100 && hi - lo > 1e-10 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (marcum_q1(a, mid) > tail ? lo : hi) = mid;
    }
    return hi / scale;
}

}  // namespace peaky
