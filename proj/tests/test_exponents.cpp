#include <cmath>
#include <memory>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "doctest.h"
#include "peaky/errors.hpp"
#include "peaky/exponents.hpp"

using namespace peaky;

namespace {

using GK = boost::math::quadrature::gauss_kronrod<double, 61>;

Scenario at_snr(Scheme s, Coherence c, int M, double nu, double K, double snr) {
    ModulationSpec mod(s, M, nu);
    return {mod, FadingSpec::from_rician(c, K, 1.0), LinkOperatingPoint::from_snr(snr, mod)};
}

// -ln int (sum_x q(x) f(y|x)^{1/(1+rho)})^{1+rho} dy for 2-OOFSK over
// noncoherent Rayleigh fading, integrated over the two bin energies.
double e0_oofsk2_rayleigh_oracle(double rho, double alpha, double nu) {
    const double var = 1 + alpha * alpha;
    const double s = 1 / (1 + rho);
    auto inner = [&](double r1) {
        return GK::integrate(
            [&](double r2) {
                const double f0 = std::exp(-r1 - r2);
                const double f1 = std::exp(-r1 / var - r2) / var;
                const double f2 = std::exp(-r1 - r2 / var) / var;
                const double mix = (1 - nu) * std::pow(f0, s) + nu / 2 * (std::pow(f1, s) + std::pow(f2, s));
                return std::pow(mix, 1 + rho);
            },
            0.0, 80.0 * var, 15, 1e-13);
    };
    return -std::log(GK::integrate(inner, 0.0, 80.0 * var, 15, 1e-13));
}

// Same functional for OOPSK over noncoherent Rician fading, in polar coordinates of y.
double e0_oopsk_noncoherent_oracle(double rho, double alpha, int M, double nu, double K) {
    const double g2 = 1 / (1 + K), d = std::sqrt(K * g2);
    const double var = 1 + alpha * alpha * g2;
    const double m = alpha * d;
    const double s = 1 / (1 + rho);
    auto inner = [&](double r) {
        return r * GK::integrate(
                       [&](double phi) {
                           double mix = (1 - nu) * std::pow(std::exp(-r * r) / M_PI, s);
                           for (int i = 0; i < M; ++i) {
                               const double th = 2 * M_PI * i / M;
                               const double dist2 = r * r + m * m - 2 * r * m * std::cos(phi - th);
                               mix += nu / M * std::pow(std::exp(-dist2 / var) / (M_PI * var), s);
                           }
                           return std::pow(mix, 1 + rho);
                       },
                       0.0, 2 * M_PI, 15, 1e-13);
    };
    return -std::log(GK::integrate(inner, 0.0, m + 12 * std::sqrt(var), 15, 1e-13));
}

struct Member {
    Scenario sc;
    std::shared_ptr<const ExponentModel> model;
};

// One model per scenario, built once and shared by the property tests.
const std::vector<Member>& family() {
    static const std::vector<Member> members = [] {
        std::vector<Member> out;
        for (double nu : {1.0, 0.6, 0.1}) {
            for (const auto& sc : {at_snr(Scheme::Oopsk, Coherence::Noncoherent, 16, nu, 1.0, 1.0),
                                   at_snr(Scheme::Oopsk, Coherence::Coherent, 8, nu, 1.0, 1.0),
                                   at_snr(Scheme::Oofsk, Coherence::Noncoherent, 2, nu, 0.0, 1.0),
                                   at_snr(Scheme::Oofsk, Coherence::Noncoherent, 3, nu, 5.0, 0.1),
                                   at_snr(Scheme::Oofsk, Coherence::Coherent, 2, nu, 1.0, 1.0)}) {
                out.push_back({sc, std::make_shared<const ExponentModel>(sc)});
            }
        }
        return out;
    }();
    return members;
}

}  // namespace

TEST_CASE("E0 against direct integration") {
    for (double nu : {1.0, 0.2}) {
        const auto sc = at_snr(Scheme::Oofsk, Coherence::Noncoherent, 2, nu, 0.0, 1.0);
        for (double rho : {0.25, 1.0}) {
            CHECK(e0(rho, sc).value ==
                  doctest::Approx(e0_oofsk2_rayleigh_oracle(rho, sc.link.alpha, nu)).epsilon(1e-8));
        }
    }
    for (double nu : {1.0, 0.4}) {
        const auto sc = at_snr(Scheme::Oopsk, Coherence::Noncoherent, 16, nu, 1.0, 1.0);
        const double ref = e0_oopsk_noncoherent_oracle(0.5, sc.link.alpha, 16, nu, 1.0);
        CHECK(e0(0.5, sc).value == doctest::Approx(ref).epsilon(1e-7));
    }
}

TEST_CASE("E0 vanishes at rho = 0 and is concave and nondecreasing") {
    const auto rhos = rho_grid(21);
    CHECK(rhos.size() == 21);
    CHECK(rhos.front() == 0.0);
    CHECK(rhos.back() == 1.0);
    for (const auto& [sc, model] : family()) {
        const auto e = model->curve({0.0}).e0_grid;
        REQUIRE(e.size() == rhos.size());
        CHECK(std::abs(e[0].second) <= 1e-8);
        for (std::size_t i = 1; i < e.size(); ++i) {
            CHECK(e[i].first == rhos[i]);
            CHECK(e[i].second - e[i - 1].second >= -1e-8);
        }
        for (std::size_t i = 1; i + 1 < e.size(); ++i) {
            CHECK(e[i + 1].second - 2 * e[i].second + e[i - 1].second <= 1e-6);
        }
    }
    // The reported grid is E0 itself.
    const auto& m = family().front();
    const auto direct = e0_batch({0.5, 1.0}, m.sc);
    const auto grid = m.model->curve({0.0}).e0_grid;
    CHECK(grid[10].second == doctest::Approx(direct[0].value).epsilon(1e-14));
    CHECK(grid[20].second == doctest::Approx(direct[1].value).epsilon(1e-14));
}

TEST_CASE("16-OOPSK noncoherent concavity") {
    const auto sc = at_snr(Scheme::Oopsk, Coherence::Noncoherent, 16, 0.4, 1.0, 1.0);
    const auto e = e0_batch(rho_grid(21), sc);
    for (std::size_t i = 1; i + 1 < e.size(); ++i) {
        CHECK(e[i + 1].value - 2 * e[i].value + e[i - 1].value <= 1e-6);
    }
}

TEST_CASE("2-OOFSK: a lower duty cycle raises E0(1)") {
    const auto low = at_snr(Scheme::Oofsk, Coherence::Noncoherent, 2, 0.2, 0.0, 1.0);
    const auto psk = at_snr(Scheme::Oofsk, Coherence::Noncoherent, 2, 1.0, 0.0, 1.0);
    CHECK(e0(1.0, low).value > e0(1.0, psk).value);
}

TEST_CASE("OOFSK quadrature and Monte Carlo integration agree") {
    for (double nu : {1.0, 0.4}) {
        for (double K : {0.0, 1.0}) {
            const auto sc = at_snr(Scheme::Oofsk, Coherence::Noncoherent, 2, nu, K, 1.0);
            ExponentOptions q;
            q.method = E0Method::Quadrature;
            ExponentOptions mc;
            mc.method = E0Method::MonteCarlo;
            const std::vector<double> rhos{0.0, 0.5, 1.0};
            const auto a = e0_batch(rhos, sc, q);
            const auto b = e0_batch(rhos, sc, mc);
            CHECK(b[0].value == 0.0);
            for (std::size_t i = 1; i < rhos.size(); ++i) {
                CHECK(a[i].std_error == 0.0);
                CHECK(b[i].std_error > 0.0);
                CHECK(std::abs(a[i].value - b[i].value) <= 3 * b[i].std_error);
            }
        }
    }
}

TEST_CASE("coherent fading average converges in the node count") {
    const auto sc = at_snr(Scheme::Oopsk, Coherence::Coherent, 16, 0.4, 1.0, 1.0);
    ExponentOptions o32, o64;
    o64.fading_nodes = 64;
    const std::vector<double> rhos{0.3, 1.0};
    const auto a = e0_batch(rhos, sc, o32);
    const auto b = e0_batch(rhos, sc, o64);
    for (std::size_t i = 0; i < rhos.size(); ++i) CHECK(a[i].value == doctest::Approx(b[i].value).epsilon(1e-7));
}

TEST_CASE("serial and parallel kernels agree bit for bit") {
    ExponentOptions par, ser;
    ser.serial = true;
    const auto rhos = rho_grid(5);
    for (const auto& sc : {at_snr(Scheme::Oopsk, Coherence::Noncoherent, 16, 0.4, 1.0, 1.0),
                           at_snr(Scheme::Oofsk, Coherence::Noncoherent, 8, 0.4, 1.0, 1.0),
                           at_snr(Scheme::Oofsk, Coherence::Coherent, 2, 0.4, 1.0, 1.0)}) {
        const auto a = e0_batch(rhos, sc, par);
        const auto b = e0_batch(rhos, sc, ser);
        for (std::size_t i = 0; i < rhos.size(); ++i) {
            CHECK(a[i].value == b[i].value);
            CHECK(a[i].std_error == b[i].std_error);
        }
    }
}

TEST_CASE("error exponent at the ends of the rate axis") {
    for (const auto& [sc, model] : family()) {
        const auto start = model->curve({0.0});
        const double e1 = start.e0_grid.back().second;
        CHECK(start.points[0].exponent == doctest::Approx(e1).epsilon(1e-12));
        if (sc.fading.regime() == Coherence::Noncoherent) {
            CHECK(start.points[0].rho_star == 1.0);
            CHECK(model->zero_exponent_rate() == model->slope_at_zero());
        } else {
            CHECK(model->zero_exponent_rate() > model->slope_at_zero());
        }
        const double slope = model->slope_at_zero();
        CHECK(slope > 0.0);
        const double top = model->zero_exponent_rate();
        const auto past = model->curve({top, top * 1.0001, 10 * top});
        for (const auto& p : past.points) {
            CHECK(p.exponent == 0.0);
            CHECK(p.rho_star == 0.0);
        }
        // Just below the slope the exponent is small but positive.
        CHECK(model->curve({0.99 * slope}).points[0].exponent > 0.0);
    }
    const auto sc = at_snr(Scheme::Oofsk, Coherence::Noncoherent, 2, 0.2, 0.0, 1.0);
    CHECK(error_exponent(0.0, sc).exponent == doctest::Approx(e0(1.0, sc).value).epsilon(1e-12));
    CHECK(error_exponent(e0_slope_at_zero(sc), sc).exponent == 0.0);
}

TEST_CASE("slope at zero matches a finite difference of E0") {
    const auto sc = at_snr(Scheme::Oofsk, Coherence::Noncoherent, 2, 0.6, 0.0, 1.0);
    const double h = 1e-4;
    const double fd = (e0(h, sc).value - e0(0.0, sc).value) / h;
    CHECK(e0_slope_at_zero(sc) == doctest::Approx(fd).epsilon(1e-3));
}

TEST_CASE("E(R) is linear below the critical rate") {
    const auto sc = at_snr(Scheme::Oopsk, Coherence::Noncoherent, 16, 0.6, 1.0, 1.0);
    const double e1 = e0(1.0, sc).value;
    // Brute-force grid maximum as the oracle for where rho* leaves 1.
    const auto grid = e0_batch(rho_grid(201), sc);
    int linear = 0;
    for (double R = 0.0; R < 0.3; R += 0.01) {
        const auto p = error_exponent(R, sc);
        double best = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i) best = std::max(best, grid[i].value - i / 200.0 * R);
        CHECK(p.exponent >= best - 1e-9);
        CHECK(p.exponent <= best + 1e-4);
        if (p.rho_star == 1.0) {
            ++linear;
            CHECK(p.exponent == doctest::Approx(e1 - R).epsilon(1e-10));
        }
    }
    CHECK(linear > 0);
}

TEST_CASE("exponent curve properties") {
    for (const auto& [sc, model] : family()) {
        const double top = model->zero_exponent_rate();
        std::vector<double> rates;
        for (int i = 0; i < 40; ++i) rates.push_back(top * i / 40.0);
        rates.push_back(top);
        const auto curve = model->curve(rates);
        REQUIRE(curve.points.size() == rates.size());
        CHECK(curve.e0_grid.size() == 21);
        CHECK(curve.points[0].exponent == doctest::Approx(curve.e0_grid.back().second).epsilon(1e-12));
        CHECK(curve.points.back().exponent == 0.0);
        for (std::size_t i = 0; i < rates.size(); ++i) {
            const auto& p = curve.points[i];
            CHECK(p.rate == rates[i]);
            CHECK(p.exponent >= 0.0);
            CHECK(p.rho_star >= 0.0);
            CHECK(p.rho_star <= 1.0);
            if (i > 0) CHECK(p.exponent <= curve.points[i - 1].exponent + 1e-12);
            if (i > 0 && i + 1 < rates.size()) {
                const double second = curve.points[i + 1].exponent - 2 * p.exponent + curve.points[i - 1].exponent;
                CHECK(second >= -1e-9);
            }
        }
    }
    CHECK_THROWS_AS(family().front().model->curve({}), DomainError);
    CHECK_THROWS_AS(family().front().model->curve({0.2, 0.1}), DomainError);
    CHECK_THROWS_AS(family().front().model->curve({-0.1}), DomainError);
}

TEST_CASE("single zero rate gives one point at E0(1)") {
    const auto sc = at_snr(Scheme::Oofsk, Coherence::Noncoherent, 2, 0.2, 0.0, 1.0);
    const auto curve = exponent_curve({0.0}, sc);
    REQUIRE(curve.points.size() == 1);
    CHECK(curve.points[0].exponent == doctest::Approx(e0(1.0, sc).value).epsilon(1e-12));
    CHECK(curve.points[0].rho_star == 1.0);
}

TEST_CASE("Monte Carlo E0 reports its integration error") {
    const auto sc = at_snr(Scheme::Oofsk, Coherence::Noncoherent, 8, 0.4, 1.0, 1.0);
    ExponentOptions o;
    o.mc_samples = 1 << 16;
    const auto curve = exponent_curve({0.0, 0.05}, sc, o);
    CHECK(curve.integration_stderr > 0.0);
    CHECK(curve.integration_stderr < 1e-2);
}
