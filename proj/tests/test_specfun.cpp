#include <cmath>
#include <limits>
#include <random>

#include <boost/math/distributions/non_central_chi_squared.hpp>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/special_functions/bessel.hpp>

#include "doctest.h"
#include "peaky/errors.hpp"
#include "peaky/specfun.hpp"

using namespace peaky;

namespace {

double q1_oracle(double a, double b) {
    boost::math::non_central_chi_squared dist(2.0, a * a);
    return boost::math::cdf(boost::math::complement(dist, b * b));
}

double i0_series(double x) {
    double term = 1.0, sum = 1.0;
    for (int k = 1; term > 1e-17 * sum; ++k) {
        term *= (x / 2) * (x / 2) / (double(k) * k);
        sum += term;
    }
    return sum;
}

}  // namespace

TEST_CASE("NumericTolerance validation") {
    CHECK_NOTHROW(NumericTolerance{}.validate());
    CHECK_THROWS_AS((NumericTolerance{0.0, 1e-10, 200}.validate()), DomainError);
    CHECK_THROWS_AS((NumericTolerance{1e-12, -1.0, 200}.validate()), DomainError);
    CHECK_THROWS_AS((NumericTolerance{1e-12, 1e-10, 0}.validate()), DomainError);
}

TEST_CASE("gaussian_q") {
    CHECK(gaussian_q(0.0) == 0.5);
    CHECK(gaussian_q(40.0) < 1e-300);
    CHECK(gaussian_q(-40.0) > 1.0 - 1e-15);

    boost::math::quadrature::exp_sinh<double> tail;
    const double pdf_tail = tail.integrate(
        [](double t) { return std::exp(-0.5 * (1.0 + t) * (1.0 + t)) / std::sqrt(2 * M_PI); });
    CHECK(gaussian_q(1.0) == doctest::Approx(pdf_tail).epsilon(1e-12));
    CHECK(gaussian_q(1.0) == doctest::Approx(0.1586552539314571).epsilon(1e-12));

    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> u(-30.0, 30.0);
    for (int i = 0; i < 1000; ++i) {
        const double x = u(gen);
        CHECK(std::abs(gaussian_q(x) + gaussian_q(-x) - 1.0) <= 1e-12);
    }
}

TEST_CASE("bessel_i0_scaled") {
    CHECK(bessel_i0_scaled(0.0) == 1.0);
    const double s5 = bessel_i0_scaled(5.0);
    CHECK(s5 <= 1.0);
    CHECK(std::exp(5.0) * s5 <= std::exp(5.0));
    CHECK(bessel_i0_scaled(1.0) == doctest::Approx(std::exp(-1.0) * i0_series(1.0)).epsilon(1e-14));
    CHECK(i0_series(1.0) == doctest::Approx(1.2660658777520082).epsilon(1e-14));

    double prev = 1.0;
    for (double x : {0.01, 0.5, 1.0, 3.0, 7.5, 15.0, 40.0, 200.0, 1e4}) {
        const double s = bessel_i0_scaled(x);
        CHECK(s > 0.0);
        CHECK(s < prev);
        prev = s;
        if (x < 700) CHECK(s == doctest::Approx(boost::math::cyl_bessel_i(0, x) * std::exp(-x)).epsilon(1e-13));
    }
}

TEST_CASE("log_bessel_i0") {
    CHECK(log_bessel_i0(0.0) == 0.0);
    CHECK(log_bessel_i0(1e-8) == doctest::Approx(0.25e-16).epsilon(1e-10));
    for (double x : {0.1, 1.0, 10.0, 100.0, 600.0}) {
        CHECK(log_bessel_i0(x) ==
              doctest::Approx(std::log(boost::math::cyl_bessel_i(0, x))).epsilon(1e-13));
    }
    // Past the overflow of I0 the asymptotic x - ln(2 pi x)/2 + ln(1 + 1/(8x)) is tight.
    const double x = 1e5;
    CHECK(log_bessel_i0(x) ==
          doctest::Approx(x - 0.5 * std::log(2 * M_PI * x) + std::log1p(1.0 / (8 * x) + 9.0 / (128 * x * x)))
              .epsilon(1e-14));
}

TEST_CASE("bessel_i0_inverse") {
    CHECK(bessel_i0_inverse(1.0) == 0.0);
    CHECK(bessel_i0_inverse(std::exp(5.0)) >= 5.0);
    NumericTolerance tol;
    for (double y : {1.5, 10.0, std::exp(10.0)}) {
        const double x = bessel_i0_inverse(y, tol);
        CHECK(std::abs(boost::math::cyl_bessel_i(0, x) / y - 1.0) <= tol.rel_tol);
    }
    // e^100 lives in the log domain.
    const double x = bessel_i0_inverse_log(100.0, tol);
    CHECK(std::abs(log_bessel_i0(x) - 100.0) <= 100.0 * tol.rel_tol);
    CHECK(x >= 100.0);
    CHECK_THROWS_AS(bessel_i0_inverse(0.5), DomainError);
}

TEST_CASE("marcum_q1 examples") {
    for (double a : {0.0, 0.3, 2.0, 40.0}) CHECK(marcum_q1(a, 0.0) == 1.0);
    CHECK(marcum_q1(0.0, 2.0) == doctest::Approx(std::exp(-2.0)).epsilon(1e-14));
    const double q = marcum_q1(1.0, 3.0);
    CHECK(q >= 0.75 * std::exp(-8.0));
    CHECK(q <= 1.5 * std::exp(-2.0));
    CHECK(q == doctest::Approx(q1_oracle(1.0, 3.0)).epsilon(1e-13));
    CHECK_THROWS_AS(marcum_q1(-1.0, 1.0), DomainError);
}

TEST_CASE("marcum_q1 against the noncentral chi-square tail") {
    std::mt19937_64 gen(12);
    std::uniform_real_distribution<double> u(0.0, 12.0);
    for (int i = 0; i < 300; ++i) {
        const double a = u(gen), b = u(gen);
        const double ref = q1_oracle(a, b);
        if (ref < 1e-250) continue;
        CHECK(marcum_q1(a, b) == doctest::Approx(ref).epsilon(1e-11));
    }
    // Large arguments where the Poisson weights underflow in the linear domain.
    CHECK(marcum_q1(60.0, 59.0) == doctest::Approx(q1_oracle(60.0, 59.0)).epsilon(1e-10));
    CHECK(marcum_q1(60.0, 61.0) == doctest::Approx(q1_oracle(60.0, 61.0)).epsilon(1e-10));
}

TEST_CASE("marcum_q1 monotone in b") {
    std::mt19937_64 gen(13);
    std::uniform_real_distribution<double> u(0.0, 10.0);
    for (int i = 0; i < 200; ++i) {
        const double a = u(gen);
        double b1 = u(gen), b2 = u(gen);
        if (b1 > b2) std::swap(b1, b2);
        CHECK(marcum_q1(a, b1) >= marcum_q1(a, b2));
    }
}

TEST_CASE("marcum_q1 exponential bounds") {
    std::mt19937_64 gen(14);
    std::uniform_real_distribution<double> u(0.01, 8.0);
    int checked = 0;
    while (checked < 100) {
        double a = u(gen), b = u(gen);
        if (a == b) continue;
        if (a > b) std::swap(a, b);
        const double q = marcum_q1(a, b);
        CHECK(q >= b / (b + a) * std::exp(-0.5 * (b + a) * (b + a)) * (1 - 1e-12));
        CHECK(q <= b / (b - a) * std::exp(-0.5 * (b - a) * (b - a)) * (1 + 1e-12));
        ++checked;
    }
}

TEST_CASE("source_entropy") {
    CHECK(source_entropy(4, 1.0) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(source_entropy(4, 0.5) == doctest::Approx(0.5 * std::log2(8.0) + 0.5).epsilon(1e-15));
    // Goes to zero with nu; at nu = 1e-3 it is still 0.0134 bits, below 0.01 from about nu = 7e-4.
    CHECK(source_entropy(4, 1e-3) == doctest::Approx(1e-3 * std::log2(4e3) - 0.999 * std::log2(0.999)).epsilon(1e-14));
    CHECK(source_entropy(4, 7e-4) < 0.01);
    double prev = source_entropy(4, 0.5);
    for (double nu : {1e-1, 1e-2, 1e-3, 1e-4, 1e-6, 1e-9}) {
        const double h = source_entropy(4, nu);
        CHECK(h < prev);
        prev = h;
    }
    CHECK(prev < 1e-7);

    std::mt19937_64 gen(15);
    std::uniform_real_distribution<double> u(1e-9, 1.0);
    for (int i = 0; i < 500; ++i) {
        const int M = 1 + static_cast<int>(gen() % 64);
        const double nu = u(gen);
        const double h = source_entropy(M, nu);
        CHECK(h >= 0.0);
        CHECK(h <= std::log2(M + 1.0) + 1e-12);
    }
}

TEST_CASE("poisson helpers") {
    CHECK(std::exp(log_poisson_pmf(3, 2.0)) == doctest::Approx(std::exp(-2.0) * 8.0 / 6.0).epsilon(1e-13));
    CHECK(std::exp(log_poisson_cdf(1, 2.0)) == doctest::Approx(3.0 * std::exp(-2.0)).epsilon(1e-13));
    CHECK(log_add_exp(-std::numeric_limits<double>::infinity(), 1.0) == 1.0);
    CHECK(log_add_exp(1000.0, 1000.0) == doctest::Approx(1000.0 + std::log(2.0)));
}
