#include "peaky/validation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "peaky/detectors.hpp"
#include "peaky/montecarlo.hpp"
#include "peaky/rng.hpp"
#include "peaky/specfun.hpp"

namespace peaky {

namespace {

std::string fmt(const char* format, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, format, args...);
    return buf;
}

Scenario make(Scheme s, Coherence c, int M, double nu, double K, double snr) {
    ModulationSpec mod(s, M, nu);
    return {mod, FadingSpec::from_rician(c, K), LinkOperatingPoint::from_snr(snr, mod)};
}

CheckResult record(std::ostream& log, std::string name, bool ok, std::string detail) {
    log << (ok ? "PASS " : "FAIL ") << name << "  " << detail << '\n';
    return {std::move(name), ok, std::move(detail)};
}

std::vector<CheckResult> grid_checks(const ValidationOptions& o, std::ostream& log) {
    auto cells = validation_grid();
    if (o.smoke) {
        std::vector<GridCell> subset;
        for (const auto& c : cells) {
            if (c.nu == 0.5 && c.ebn0_db == 5.0 && c.K == 0.0 && c.M == 4) subset.push_back(c);
        }
        cells = subset;
    }
    std::vector<CheckResult> out;
    double worst = 0.0;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        const auto& c = cells[i];
        ModulationSpec mod(c.scheme, c.M, c.nu);
        const Scenario sc{mod, FadingSpec::from_rician(c.regime, c.K),
                          LinkOperatingPoint::from_ebn0(from_db(c.ebn0_db), mod)};
        const double pe = error_probability_perturbed(sc, o.perturb_tau).pe;
        SimulationOptions so;
        so.workers = o.workers;
        const auto sim = simulate(sc, o.trials, splitmix64(o.seed + i), so);
        const double z = binomial_z(sim.pe_hat, pe, o.trials);
        worst = std::max(worst, z);
        out.push_back(record(log,
                             fmt("grid %s/%s M=%d nu=%g EbN0=%gdB K=%g", to_string(c.scheme).c_str(),
                                 to_string(c.regime).c_str(), c.M, c.nu, c.ebn0_db, c.K),
                             z <= 3.0,
                             fmt("pe=%.6e pe_mc=%.6e z=%.3f", pe, sim.pe_hat, z)));
    }
    log << fmt("grid: %zu cells, max z = %.3f\n", cells.size(), worst);
    return out;
}

std::vector<CheckResult> limit_checks(const ValidationOptions& o, std::ostream& log) {
    std::vector<CheckResult> out;
    // Low SNR: pe -> nu whenever nu < M/(M+1).
    for (auto s : {Scheme::Oopsk, Scheme::Oofsk}) {
        for (auto c : {Coherence::Coherent, Coherence::Noncoherent}) {
            for (int M : {2, 4, 8, 16}) {
                for (double nu : {0.5, 0.1}) {
                    for (double K : {0.0, 10.0}) {
                        const auto sc = make(s, c, M, nu, K, 1e-6);
                        const double pe = error_probability_perturbed(sc, o.perturb_tau).pe;
                        const bool ok = std::abs(pe - nu) <= 1e-3;
                        if (!ok) {
                            out.push_back(record(log, fmt("low-snr %s/%s M=%d nu=%g K=%g", to_string(s).c_str(),
                                                          to_string(c).c_str(), M, nu, K),
                                                 false, fmt("pe=%.6e", pe)));
                        }
                    }
                }
            }
        }
    }
    if (out.empty()) out.push_back(record(log, "low-snr limit pe -> nu", true, "all 64 scenarios within 1e-3"));

    const auto ray = error_probability(make(Scheme::Oopsk, Coherence::Noncoherent, 4, 0.1, 0.0, 1e6)).pe;
    out.push_back(record(log, "floor rayleigh 4-OOPSK nu=0.1", std::abs(ray - 0.075) <= 0.05 * 0.075,
                         fmt("pe(snr=1e6)=%.6e target 0.075", ray)));
    const double floor_k10 = oopsk_noncoherent_error_floor(10.0, 8, 0.1);
    const auto k10 = error_probability(make(Scheme::Oopsk, Coherence::Noncoherent, 8, 0.1, 10.0, 1e6)).pe;
    out.push_back(record(log, "floor K=10 8-OOPSK nu=0.1", std::abs(k10 - floor_k10) <= 1e-3 * 0.1,
                         fmt("pe(snr=1e6)=%.6e floor=%.6e", k10, floor_k10)));
    const auto fsk = error_probability(make(Scheme::Oofsk, Coherence::Noncoherent, 4, 0.1, 0.0, 1e6)).pe;
    out.push_back(record(log, "no floor 4-OOFSK noncoherent", fsk < 1e-6, fmt("pe(snr=1e6)=%.3e", fsk)));
    return out;
}

std::vector<CheckResult> reduction_checks(std::ostream& log) {
    double worst_bpsk = 0.0, worst_fsk = 0.0, worst_ncfsk = 0.0, worst_avg = 0.0;
    for (double a : {0.25, 0.5, 1.0, 2.0, 3.0}) {
        worst_bpsk = std::max(worst_bpsk,
                              std::abs(pe_oopsk_coherent_given_h(1.0, a, 2, 1.0).pe - gaussian_q(std::sqrt(2.0) * a)));
        worst_fsk = std::max(worst_fsk,
                             std::abs(pe_oofsk_coherent_given_h(1.0, a, 2, 1.0).pe - 0.5 * std::exp(-a * a / 2.0)));
        worst_ncfsk = std::max(worst_ncfsk, std::abs(pe_oofsk_noncoherent(a, 0.0, 1.0, 2, 1.0).pe - 1.0 / (2.0 + a * a)));
        const auto ray = FadingSpec::from_rician(Coherence::Coherent, 0.0);
        const double avg = average_over_fading(
            [a](double r) { return pe_oopsk_coherent_given_h(r, a, 2, 1.0).pe; }, ray);
        worst_avg = std::max(worst_avg, std::abs(avg - 0.5 * (1.0 - std::sqrt(a * a / (1.0 + a * a)))));
    }
    return {record(log, "BPSK reduction", worst_bpsk <= 1e-10, fmt("max diff %.2e", worst_bpsk)),
            record(log, "BPSK Rayleigh average", worst_avg <= 1e-6, fmt("max diff %.2e", worst_avg)),
            record(log, "coherent BFSK reduction", worst_fsk <= 1e-10, fmt("max diff %.2e", worst_fsk)),
            record(log, "noncoherent BFSK Rayleigh reduction", worst_ncfsk <= 1e-10, fmt("max diff %.2e", worst_ncfsk))};
}

std::vector<CheckResult> ordering_checks(std::ostream& log) {
    auto pe = [](double nu, double ebn0_db) {
        ModulationSpec mod(Scheme::Oopsk, 4, nu);
        const Scenario sc{mod, FadingSpec::from_rician(Coherence::Coherent, 0.0),
                          LinkOperatingPoint::from_ebn0(from_db(ebn0_db), mod)};
        return error_probability(sc).pe;
    };
    const double p01 = pe(0.1, 10.0), p03 = pe(0.3, 10.0), p1 = pe(1.0, 10.0);
    bool worse = false;
    for (int db = 0; db <= 20; ++db) worse = worse || pe(0.8, db) > pe(1.0, db);
    return {record(log, "4-OOPSK 10dB: pe(0.1) < pe(0.3) < pe(1)", p01 < p03 && p03 < p1,
                   fmt("%.4e < %.4e < %.4e", p01, p03, p1)),
            record(log, "4-OOPSK: nu=0.8 worse than nu=1 somewhere on 0..20 dB", worse, "")};
}

void sign_variant_report(const ValidationOptions& o, std::ostream& log) {
    ModulationSpec mod(Scheme::Oopsk, 8, 0.1);
    const Scenario sc{mod, FadingSpec::from_rician(Coherence::Noncoherent, 10.0),
                      LinkOperatingPoint::from_ebn0(from_db(10.0), mod)};
    const double tau = reference_threshold(sc);
    const double a = sc.link.alpha;
    const auto plus = pe_oopsk_noncoherent_at_threshold(a, sc.fading.d_mag(), sc.fading.gamma2(), 8, 0.1, tau);
    const auto minus = pe_oopsk_noncoherent_at_threshold(a, sc.fading.d_mag(), sc.fading.gamma2(), 8, 0.1, tau,
                                                         {}, CapSign::Minus);
    SimulationOptions so;
    so.workers = o.workers;
    const auto sim = simulate(sc, o.trials, splitmix64(o.seed ^ 0xcafeULL), so);
    log << fmt("cap-sign variants (8-OOPSK noncoherent K=10 nu=0.1 10dB): region form pe=%.6e (z=%.2f), "
               "printed form pe=%.6e (z=%.2f), simulation %.6e\n",
               plus.pe, binomial_z(sim.pe_hat, plus.pe, sim.trials), minus.pe,
               binomial_z(sim.pe_hat, std::clamp(minus.pe, 1e-300, 1.0), sim.trials), sim.pe_hat);
}

}  // namespace

bool ValidationReport::passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

std::vector<GridCell> validation_grid() {
    std::vector<GridCell> cells;
    for (auto s : {Scheme::Oopsk, Scheme::Oofsk}) {
        for (auto c : {Coherence::Coherent, Coherence::Noncoherent}) {
            std::vector<int> sizes{2, 4, 8};
            if (s == Scheme::Oofsk) sizes.push_back(16);
            for (int M : sizes) {
                for (double nu : {1.0, 0.5, 0.1}) {
                    for (double db : {0.0, 5.0, 10.0}) {
                        for (double K : {0.0, 10.0}) cells.push_back({s, c, M, nu, db, K});
                    }
                }
            }
        }
    }
    return cells;
}

ErrorProbabilityBreakdown error_probability_perturbed(const Scenario& sc, double perturb,
                                                      const QuadratureTolerance& tol) {
    if (perturb == 0.0) return error_probability(sc, tol);
    const double scale = 1.0 + perturb;
    const int M = sc.modulation.M();
    const double nu = sc.modulation.nu();
    const double a = sc.link.alpha;
    const auto& f = sc.fading;
    if (f.regime() == Coherence::Coherent) {
        if (sc.modulation.scheme() == Scheme::Oopsk) {
            return average_over_fading(
                [&](double r) {
                    return pe_oopsk_coherent_at_threshold(r, a, M, nu,
                                                          scale * oopsk_coherent_threshold(a, r, M, nu), tol);
                },
                f);
        }
        return average_over_fading(
            [&](double r) {
                return pe_oofsk_coherent_at_threshold(r, a, M, nu, scale * oofsk_coherent_threshold(a, r, M, nu),
                                                      tol);
            },
            f);
    }
    const double tau = scale * reference_threshold(sc);
    if (sc.modulation.scheme() == Scheme::Oopsk) {
        return pe_oopsk_noncoherent_at_threshold(a, f.d_mag(), f.gamma2(), M, nu, tau, tol);
    }
    return pe_oofsk_noncoherent_at_threshold(a, f.d_mag(), f.gamma2(), M, nu, tau, tol);
}

double binomial_z(double pe_hat, double pe, std::int64_t trials) {
    const double sd = std::sqrt(pe * (1.0 - pe) / static_cast<double>(trials));
    if (sd == 0.0) return pe_hat == pe ? 0.0 : std::numeric_limits<double>::infinity();
    return std::abs(pe_hat - pe) / sd;
}

ValidationReport run_validation(const ValidationOptions& o, std::ostream& log) {
    ValidationReport report;
    auto add = [&](std::vector<CheckResult> v) {
        report.checks.insert(report.checks.end(), v.begin(), v.end());
    };
    add(grid_checks(o, log));
    add(limit_checks(o, log));
    add(reduction_checks(log));
    add(ordering_checks(log));
    sign_variant_report(o, log);
    log << (report.passed() ? "validate: all checks passed\n" : "validate: FAILED\n");
    return report;
}

}  // namespace peaky
