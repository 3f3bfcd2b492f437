#include "peaky/analytic.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "peaky/detectors.hpp"
#include "peaky/errors.hpp"
#include "peaky/specfun.hpp"

namespace peaky {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Gaussian weights are truncated this many standard deviations from their mean.
constexpr double kTailSigmas = 12.0;
const double kInvSqrtPi = 1.0 / std::sqrt(std::numbers::pi);

// Largest M for which the alternating Marcum-Q sum is used under OofskMethod::Auto.
constexpr int kAlternatingSumMaxM = 16;

double clamp01(double p) { return std::min(1.0, std::max(0.0, p)); }

// tan(pi/M); +inf for M = 2 (the wedge is a half plane).
double wedge_slope(int M) { return M == 2 ? kInf : std::tan(std::numbers::pi / M); }

// Integral of g over [lo, hi] clipped to the support window of a Gaussian
// weight with the given mean and standard deviation.
template <class F>
double integrate_window(const F& g, double lo, double hi, double mean, double sd,
                        const QuadratureTolerance& tol) {
    lo = std::max(lo, mean - kTailSigmas * sd);
    hi = std::min(hi, mean + kTailSigmas * sd);
    if (!(lo < hi)) return 0.0;
    return integrate(g, lo, hi, tol);
}

double binomial(int n, int k) {
    double c = 1.0;
    for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
    return c;
}

void check_spec(double alpha, int M, double nu, int min_m) {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw DomainError("alpha must be finite and > 0");
    if (M < min_m) throw DomainError("constellation size too small for this scheme");
    if (!(nu > 0.0 && nu <= 1.0)) throw DomainError("nu must lie in (0, 1]");
}

// P(every one of the M noise-only bins stays below tau) complement for s0:
// 1 - (1 - e^{-tau})^M.
double oofsk_error_s0(int M, double tau) {
    if (tau == kInf) return 0.0;
    if (tau <= 0.0) return 1.0;
    return -std::expm1(M * std::log1p(-std::exp(-tau)));
}

// Correct detection of s1 for energy detection when the signal bin holds
// |mu + sqrt(spread) n|^2 with |mu|^2 = los2, via the alternating Marcum-Q sum.
double oofsk_correct_s1_sum(double los2, double spread, int M, double tau) {
    if (tau == kInf) return 0.0;
    CompensatedSum sum;
    for (int n = 0; n < M; ++n) {
        const double denom = n * spread + 1.0;
        const double a = std::sqrt(2.0 * los2 / (spread * denom));
        const double b = std::sqrt(2.0 * denom * tau / spread);
        const double weight = binomial(M - 1, n) * std::exp(-n * los2 / denom) / denom;
        const double term = weight * marcum_q1(a, b);
        sum.add(n % 2 == 0 ? term : -term);
    }
    return sum.value();
}

// Same quantity from the single integral, returned as the error probability
// 1 - P(correct | s1). With u = sqrt(2x/spread) the signal-bin energy has the
// Rice density u e^{-(u-a)^2/2} e^{-au} I0(au), a = sqrt(2 los2/spread).
double oofsk_error_s1_integral(double los2, double spread, int M, double tau,
                               const QuadratureTolerance& tol) {
    if (tau == kInf) return 1.0;
    const double a = std::sqrt(2.0 * los2 / spread);
    const double u0 = std::sqrt(2.0 * std::max(tau, 0.0) / spread);
    auto rice = [a](double u) {
        const double d = u - a;
        return u * std::exp(-0.5 * d * d) * bessel_i0_scaled(a * u);
    };
    // Probability that some noise bin beats an energy x in the signal bin.
    auto beaten = [M, spread](double u) {
        if (M == 1) return 0.0;
        const double x = 0.5 * spread * u * u;
        return -std::expm1((M - 1) * std::log1p(-std::exp(-x)));
    };
    const double below = integrate_window(rice, 0.0, u0, a, 1.0, tol);
    const double lost = integrate_window([&](double u) { return beaten(u) * rice(u); }, u0, kInf,
                                         a, 1.0, tol);
    return below + lost;
}

double oofsk_error_s1(double los2, double spread, int M, double tau, const QuadratureTolerance& tol,
                      OofskMethod method) {
    const bool use_sum = method == OofskMethod::AlternatingSum ||
                         (method == OofskMethod::Auto && M <= kAlternatingSumMaxM);
    if (use_sum) return clamp01(1.0 - oofsk_correct_s1_sum(los2, spread, M, tau));
    return clamp01(oofsk_error_s1_integral(los2, spread, M, tau, tol));
}

}  // namespace

ErrorProbabilityBreakdown breakdown_from_errors(double nu, double pe_s0, double pe_s1) {
    pe_s0 = clamp01(pe_s0);
    pe_s1 = clamp01(pe_s1);
    if (nu == 1.0) pe_s0 = 0.0;
    ErrorProbabilityBreakdown b;
    b.pc_s0 = 1.0 - pe_s0;
    b.pc_s1 = 1.0 - pe_s1;
    b.pe = 1.0 - ((1.0 - nu) * b.pc_s0 + nu * b.pc_s1);
    return b;
}

ErrorProbabilityBreakdown pe_oopsk_coherent_at_threshold(double h_mag, double alpha, int M, double nu,
                                                         double tau, const QuadratureTolerance& tol) {
    check_spec(alpha, M, nu, 2);
    if (!(tau >= 0.0)) throw DomainError("threshold must be >= 0");
    const double gain = alpha * h_mag;
    const double slope = wedge_slope(M);
    const double sd = 1.0 / std::numbers::sqrt2;

    // s0: leaves the off region when its projection on the winning phase exceeds tau.
    double pe_s0 = 0.0;
    if (tau != kInf) {
        if (M == 2) {
            pe_s0 = std::erfc(tau);
        } else {
            auto g = [&](double x) { return std::erf(x * slope) * kInvSqrtPi * std::exp(-x * x); };
            pe_s0 = M * integrate_window(g, tau, kInf, 0.0, sd, tol);
        }
    }

    // s1: projection on theta_1 below tau, or another phase wins.
    double pe_s1 = 1.0;
    if (tau != kInf) {
        pe_s1 = 0.5 * std::erfc(gain - tau);
        if (M > 2) {
            auto g = [&](double x) {
                const double d = x - gain;
                return std::erfc(x * slope) * kInvSqrtPi * std::exp(-d * d);
            };
            pe_s1 += integrate_window(g, tau, kInf, gain, sd, tol);
        }
    }
    return breakdown_from_errors(nu, pe_s0, pe_s1);
}

ErrorProbabilityBreakdown pe_oopsk_coherent_given_h(double h_mag, double alpha, int M, double nu,
                                                    const QuadratureTolerance& tol) {
    return pe_oopsk_coherent_at_threshold(h_mag, alpha, M, nu,
                                          oopsk_coherent_threshold(alpha, h_mag, M, nu), tol);
}

ErrorProbabilityBreakdown pe_oofsk_coherent_at_threshold(double h_mag, double alpha, int M, double nu,
                                                         double tau, const QuadratureTolerance& tol,
                                                         OofskMethod method) {
    check_spec(alpha, M, nu, 1);
    if (!(tau >= 0.0)) throw DomainError("threshold must be >= 0");
    const double los2 = alpha * alpha * h_mag * h_mag;
    return breakdown_from_errors(nu, oofsk_error_s0(M, tau),
                                 oofsk_error_s1(los2, 1.0, M, tau, tol, method));
}

ErrorProbabilityBreakdown pe_oofsk_coherent_given_h(double h_mag, double alpha, int M, double nu,
                                                    const QuadratureTolerance& tol,
                                                    OofskMethod method) {
    return pe_oofsk_coherent_at_threshold(h_mag, alpha, M, nu,
                                          oofsk_coherent_threshold(alpha, h_mag, M, nu), tol, method);
}

ErrorProbabilityBreakdown pe_oopsk_noncoherent_at_threshold(double alpha, double d_mag, double gamma2,
                                                            int M, double nu, double tau,
                                                            const QuadratureTolerance& tol,
                                                            CapSign sign) {
    check_spec(alpha, M, nu, 2);
    if (!(gamma2 > 0.0)) throw DomainError("noncoherent OOPSK requires gamma2 > 0");
    if (!(tau >= 0.0)) throw DomainError("threshold must be >= 0");
    if (tau == kInf) return breakdown_from_errors(nu, 0.0, 1.0);

    const double slope = wedge_slope(M);
    const double spread = 1.0 + alpha * alpha * gamma2;
    const double root_spread = std::sqrt(spread);
    const double mean = alpha * d_mag;
    const double offset = d_mag / (alpha * gamma2);  // circle centre sits at -offset
    // Where the wedge edge meets the circle, and where the circle crosses the axis.
    const double edge_hit =
        M == 2 ? 0.0 : tau / (std::sqrt(offset * offset + tau * (1.0 + slope * slope)) + offset);
    const double axis_hit = tau / (std::sqrt(offset * offset + tau) + offset);
    auto cap = [&](double x) { return std::sqrt(std::max(0.0, tau - x * x - 2.0 * offset * x)); };
    auto wedge = [&](double x, double scale) { return M == 2 ? 1.0 : std::erf(x * slope / scale); };

    const double sd0 = 1.0 / std::numbers::sqrt2;
    auto phi0 = [](double x) { return kInvSqrtPi * std::exp(-x * x); };

    // s0 in wedge 1 but outside the circle, times M.
    const double ring = integrate_window(
        [&](double x) { return (wedge(x, 1.0) - std::erf(cap(x))) * phi0(x); }, edge_hit, axis_hit,
        0.0, sd0, tol);
    const double outer =
        integrate_window([&](double x) { return wedge(x, 1.0) * phi0(x); }, axis_hit, kInf, 0.0, sd0, tol);
    double pe_s0 = M * (ring + outer);
    if (sign == CapSign::Minus) {
        const double cap_mass = integrate_window(
            [&](double x) { return std::erf(cap(x)) * phi0(x); }, edge_hit, axis_hit, 0.0, sd0, tol);
        pe_s0 += 2.0 * M * cap_mass;
    }

    // s1 outside wedge 1, or inside wedge 1 and inside the circle.
    const double sd1 = root_spread / std::numbers::sqrt2;
    auto phi1 = [&](double x) {
        const double d = x - mean;
        return kInvSqrtPi / root_spread * std::exp(-d * d / spread);
    };
    double pe_s1 = 0.5 * std::erfc(mean / root_spread);
    if (M > 2) {
        pe_s1 += integrate_window([&](double x) { return std::erfc(x * slope / root_spread) * phi1(x); },
                                  0.0, kInf, mean, sd1, tol);
        pe_s1 += integrate_window([&](double x) { return wedge(x, root_spread) * phi1(x); }, 0.0,
                                  edge_hit, mean, sd1, tol);
    }
    pe_s1 += integrate_window([&](double x) { return std::erf(cap(x) / root_spread) * phi1(x); },
                              edge_hit, axis_hit, mean, sd1, tol);
    return breakdown_from_errors(nu, pe_s0, pe_s1);
}

ErrorProbabilityBreakdown pe_oopsk_noncoherent(double alpha, double d_mag, double gamma2, int M,
                                               double nu, const QuadratureTolerance& tol) {
    const double tau = oopsk_noncoherent_threshold(alpha, d_mag, gamma2, M, nu);
    return pe_oopsk_noncoherent_at_threshold(alpha, d_mag, gamma2, M, nu, tau, tol);
}

ErrorProbabilityBreakdown pe_oofsk_noncoherent_at_threshold(double alpha, double d_mag, double gamma2,
                                                            int M, double nu, double tau,
                                                            const QuadratureTolerance& tol,
                                                            OofskMethod method) {
    check_spec(alpha, M, nu, 1);
    if (!(gamma2 > 0.0)) throw DomainError("noncoherent OOFSK requires gamma2 > 0");
    if (!(tau >= 0.0)) throw DomainError("threshold must be >= 0");
    const double spread = 1.0 + alpha * alpha * gamma2;
    const double los2 = alpha * alpha * d_mag * d_mag;
    return breakdown_from_errors(nu, oofsk_error_s0(M, tau),
                                 oofsk_error_s1(los2, spread, M, tau, tol, method));
}

ErrorProbabilityBreakdown pe_oofsk_noncoherent(double alpha, double d_mag, double gamma2, int M,
                                               double nu, const QuadratureTolerance& tol,
                                               OofskMethod method) {
    const double tau = oofsk_noncoherent_threshold(alpha, d_mag, gamma2, M, nu);
    return pe_oofsk_noncoherent_at_threshold(alpha, d_mag, gamma2, M, nu, tau, tol, method);
}

double average_over_fading(const std::function<double(double)>& g, const FadingSpec& fading, int nodes) {
    if (fading.gamma2() == 0.0) return g(fading.d_mag());
    const double r_max = fading_magnitude_upper(fading);
    const auto& rule = gauss_legendre(nodes);
    const double half = 0.5 * r_max;
    CompensatedSum sum, mass;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double r = half * (1.0 + rule.nodes[i]);
        const double w = rule.weights[i] * half * fading_magnitude_pdf(r, fading);
        sum.add(w * g(r));
        mass.add(w);
    }
    // Renormalize by the captured mass so that constants average exactly.
    return sum.value() / mass.value();
}

ErrorProbabilityBreakdown average_over_fading(
    const std::function<ErrorProbabilityBreakdown(double)>& given_h, const FadingSpec& fading,
    int nodes) {
    if (fading.gamma2() == 0.0) return given_h(fading.d_mag());
    const double r_max = fading_magnitude_upper(fading);
    const auto& rule = gauss_legendre(nodes);
    const double half = 0.5 * r_max;
    CompensatedSum pe, pc0, pc1, mass;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double r = half * (1.0 + rule.nodes[i]);
        const double w = rule.weights[i] * half * fading_magnitude_pdf(r, fading);
        const auto b = given_h(r);
        pe.add(w * b.pe);
        pc0.add(w * b.pc_s0);
        pc1.add(w * b.pc_s1);
        mass.add(w);
    }
    const double m = mass.value();
    return {clamp01(pe.value() / m), clamp01(pc0.value() / m), clamp01(pc1.value() / m)};
}

double oopsk_noncoherent_correct_limit(double K, int M, const QuadratureTolerance& tol) {
    if (!(K >= 0.0)) throw DomainError("K must be >= 0");
    if (M < 2) throw DomainError("OOPSK requires M >= 2");
    if (std::isinf(K)) return 1.0;
    const double shift = std::sqrt(K);
    double miss = 0.5 * std::erfc(shift);
    if (M > 2) {
        const double slope = wedge_slope(M);
        auto g = [&](double x) { return std::erfc(slope * (x + shift)) * kInvSqrtPi * std::exp(-x * x); };
        miss += integrate_window(g, -shift, kInf, 0.0, 1.0 / std::numbers::sqrt2, tol);
    }
    return clamp01(1.0 - miss);
}

double oopsk_noncoherent_error_floor(double K, int M, double nu, const QuadratureTolerance& tol) {
    if (!(nu > 0.0 && nu <= 1.0)) throw DomainError("nu must lie in (0, 1]");
    return nu * (1.0 - oopsk_noncoherent_correct_limit(K, M, tol));
}

ErrorProbabilityBreakdown error_probability(const Scenario& sc, const QuadratureTolerance& tol) {
    const auto& mod = sc.modulation;
    const auto& fad = sc.fading;
    const double alpha = sc.link.alpha;
    const int M = mod.M();
    const double nu = mod.nu();
    if (fad.regime() == Coherence::Coherent) {
        if (mod.scheme() == Scheme::Oopsk) {
            return average_over_fading(
                [&](double r) { return pe_oopsk_coherent_given_h(r, alpha, M, nu, tol); }, fad);
        }
        return average_over_fading(
            [&](double r) { return pe_oofsk_coherent_given_h(r, alpha, M, nu, tol); }, fad);
    }
    if (mod.scheme() == Scheme::Oopsk) {
        return pe_oopsk_noncoherent(alpha, fad.d_mag(), fad.gamma2(), M, nu, tol);
    }
    return pe_oofsk_noncoherent(alpha, fad.d_mag(), fad.gamma2(), M, nu, tol);
}

double reference_threshold(const Scenario& sc) {
    const auto& mod = sc.modulation;
    const auto& fad = sc.fading;
    const double alpha = sc.link.alpha;
    if (fad.regime() == Coherence::Coherent) {
        const double h = std::sqrt(fad.omega());
        return mod.scheme() == Scheme::Oopsk ? oopsk_coherent_threshold(alpha, h, mod.M(), mod.nu())
                                             : oofsk_coherent_threshold(alpha, h, mod.M(), mod.nu());
    }
    return mod.scheme() == Scheme::Oopsk
               ? oopsk_noncoherent_threshold(alpha, fad.d_mag(), fad.gamma2(), mod.M(), mod.nu())
               : oofsk_noncoherent_threshold(alpha, fad.d_mag(), fad.gamma2(), mod.M(), mod.nu());
}

}  // namespace peaky
