#include <cmath>

#include "doctest.h"
#include "peaky/analytic.hpp"
#include "peaky/errors.hpp"
#include "peaky/montecarlo.hpp"

using namespace peaky;

namespace {

Scenario at_snr(Scheme s, Coherence c, int M, double nu, double K, double snr) {
    ModulationSpec mod(s, M, nu);
    return {mod, FadingSpec::from_rician(c, K, 1.0), LinkOperatingPoint::from_snr(snr, mod)};
}

Scenario at_ebn0_db(Scheme s, Coherence c, int M, double nu, double K, double db) {
    ModulationSpec mod(s, M, nu);
    return {mod, FadingSpec::from_rician(c, K, 1.0), LinkOperatingPoint::from_ebn0(from_db(db), mod)};
}

}  // namespace

TEST_CASE("result does not depend on the worker count") {
    const auto sc = at_ebn0_db(Scheme::Oopsk, Coherence::Noncoherent, 8, 0.5, 10.0, 5.0);
    const std::int64_t n = 5 * kChunkSize + 1234;
    const auto serial = simulate_serial(sc, n, 42);
    SimulationOptions one{1, 1.0}, eight{8, 1.0};
    const auto r1 = simulate(sc, n, 42, one);
    const auto r8 = simulate(sc, n, 42, eight);
    CHECK(r1 == r8);
    CHECK(serial == r1);
    CHECK(r1.trials == n);
    CHECK(r1.worker_chunks == 6);
    CHECK(r1.pe_hat == double(r1.errors) / n);
    CHECK(r1.std_error == doctest::Approx(std::sqrt(r1.pe_hat * (1 - r1.pe_hat) / n)));
    CHECK(simulate(sc, n, 43, one) != r1);
}

TEST_CASE("every scheme and regime is deterministic across workers") {
    for (auto s : {Scheme::Oopsk, Scheme::Oofsk}) {
        for (auto c : {Coherence::Coherent, Coherence::Noncoherent}) {
            const auto sc = at_ebn0_db(s, c, 4, 0.3, 1.0, 3.0);
            CHECK(simulate(sc, 3 * kChunkSize, 5, {1, 1.0}) == simulate(sc, 3 * kChunkSize, 5, {4, 1.0}));
        }
    }
}

TEST_CASE("noiseless coherent channel makes no errors") {
    for (auto s : {Scheme::Oopsk, Scheme::Oofsk}) {
        const auto sc = at_snr(s, Coherence::Coherent, 8, 1.0, 0.0, 1.0);
        const auto r = simulate(sc, 100000, 9, {0, 0.0});
        CHECK(r.errors == 0);
        CHECK(r.pe_hat == 0.0);
    }
}

TEST_CASE("input validation") {
    const auto sc = at_snr(Scheme::Oopsk, Coherence::Coherent, 4, 0.5, 0.0, 1.0);
    CHECK_THROWS_AS(simulate(sc, 0, 1), DomainError);
    CHECK_THROWS_AS(simulate(sc, 100, 1, {0, -1.0}), DomainError);
}

TEST_CASE("prior and energy consistency") {
    for (double nu : {0.1, 0.5, 0.9}) {
        const auto sc = at_snr(Scheme::Oopsk, Coherence::Noncoherent, 4, nu, 1.0, 2.0);
        const std::int64_t n = 400000;
        const auto r = simulate(sc, n, 77);
        const double off = double(r.off_sent) / n;
        CHECK(std::abs(off - (1 - nu)) <= 4 * std::sqrt(nu * (1 - nu) / n));
        // |s|^2 is alpha^2 with probability nu and 0 otherwise.
        const double a2 = sc.link.alpha * sc.link.alpha;
        const double mean = r.energy_sum / n;
        const double sd = a2 * std::sqrt(nu * (1 - nu) / n);
        CHECK(std::abs(mean - sc.link.snr) <= 4 * sd);
    }
}

TEST_CASE("Rayleigh BFSK simulation matches 1/(2 + alpha^2 gamma^2)") {
    const auto sc = at_snr(Scheme::Oofsk, Coherence::Noncoherent, 2, 1.0, 0.0, 2.0);
    const auto r = simulate(sc, 1000000, 2024);
    CHECK(std::abs(r.pe_hat - 0.25) <= 3 * r.std_error);
}

TEST_CASE("noncoherent OOPSK simulation matches the analytic value") {
    const auto sc = at_ebn0_db(Scheme::Oopsk, Coherence::Noncoherent, 8, 0.1, 10.0, 10.0);
    const auto r = simulate(sc, 1000000, 2025);
    const double pe = error_probability(sc).pe;
    CHECK(std::abs(r.pe_hat - pe) <= 3 * r.std_error);
}

TEST_CASE("s0 errors track the analytic conditional") {
    const auto sc = at_ebn0_db(Scheme::Oofsk, Coherence::Coherent, 4, 0.5, 0.0, 5.0);
    const auto r = simulate(sc, 1000000, 2026);
    const auto b = error_probability(sc);
    const double p0 = 1 - b.pc_s0;
    const double hat = double(r.off_errors) / r.off_sent;
    CHECK(std::abs(hat - p0) <= 4 * std::sqrt(p0 * (1 - p0) / r.off_sent));
}
