#pragma once

#include <algorithm>
#include <cmath>
#include <queue>
#include <string>
#include <vector>

#include "peaky/errors.hpp"

namespace peaky {

struct QuadratureTolerance {
    double abs_tol = 1e-12;
    double rel_tol = 1e-9;
    int max_intervals = 4000;
};

/// Gauss-Legendre rule on [-1, 1].
struct GaussLegendreRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Rules are built once per order and cached; safe to call concurrently.
const GaussLegendreRule& gauss_legendre(int order);

namespace detail {

struct KronrodResult {
    double value;
    double error;
};

// 15-point Kronrod rule with its embedded 7-point Gauss rule.
template <class F>
KronrodResult gauss_kronrod15(const F& f, double a, double b) {
    static constexpr double xk[8] = {
        0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
        0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
        0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
        0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
    static constexpr double wk[8] = {
        0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
        0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
        0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
        0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
    static constexpr double wg[4] = {
        0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
        0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(center);
    double kronrod = wk[7] * fc;
    double gauss = wg[3] * fc;
    for (int j = 0; j < 7; ++j) {
        const double dx = half * xk[j];
        const double pair = f(center - dx) + f(center + dx);
        kronrod += wk[j] * pair;
        if (j % 2 == 1) gauss += wg[j / 2] * pair;
    }
    return {kronrod * half, std::abs((kronrod - gauss) * half)};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod integration of f over [a, b] (finite).
/// Bisects the interval with the largest error estimate until the total
/// estimate is below max(abs_tol, rel_tol |I|). Throws NumericError when the
/// interval budget runs out far from tolerance.
template <class F>
double integrate(const F& f, double a, double b, const QuadratureTolerance& tol = {}) {
    if (!(a <= b)) {
        if (a > b) return -integrate(f, b, a, tol);
        throw DomainError("integrate: limits must not be NaN");
    }
    if (a == b) return 0.0;
    if (!std::isfinite(a) || !std::isfinite(b)) throw DomainError("integrate: limits must be finite");

    struct Piece {
        double a, b, value, error;
        bool operator<(const Piece& o) const { return error < o.error; }
    };
    std::priority_queue<Piece> pieces;
    auto first = detail::gauss_kronrod15(f, a, b);
    pieces.push({a, b, first.value, first.error});
    double total = first.value;
    double total_error = first.error;

    for (int n = 1; n < tol.max_intervals; ++n) {
        if (total_error <= std::max(tol.abs_tol, tol.rel_tol * std::abs(total))) return total;
        Piece worst = pieces.top();
        pieces.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid <= worst.a || mid >= worst.b) {
            // Cannot split further; keep the piece and stop refining it.
            pieces.push({worst.a, worst.b, worst.value, 0.0});
            total_error -= worst.error;
            continue;
        }
        const auto left = detail::gauss_kronrod15(f, worst.a, mid);
        const auto right = detail::gauss_kronrod15(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        total_error += left.error + right.error - worst.error;
        pieces.push({worst.a, mid, left.value, left.error});
        pieces.push({mid, worst.b, right.value, right.error});
    }
    // Recompute from the pieces to shed accumulated rounding in the running sums.
    double sum = 0.0, err = 0.0;
    while (!pieces.empty()) {
        sum += pieces.top().value;
        err += pieces.top().error;
        pieces.pop();
    }
    if (err <= 1e3 * std::max(tol.abs_tol, tol.rel_tol * std::abs(sum))) return sum;
    throw NumericError("integrate: interval budget exhausted, error estimate " + std::to_string(err));
}

/// Fixed-order Gauss-Legendre integration over [a, b].
template <class F>
double integrate_gauss_legendre(const F& f, double a, double b, int order) {
    const auto& rule = gauss_legendre(order);
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double sum = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        sum += rule.weights[i] * f(center + half * rule.nodes[i]);
    }
    return sum * half;
}

/// Running sum with Neumaier compensation.
class CompensatedSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            carry_ += (sum_ - t) + x;
        } else {
            carry_ += (x - t) + sum_;
        }
        sum_ = t;
    }
    double value() const { return sum_ + carry_; }

private:
    double sum_ = 0.0;
    double carry_ = 0.0;
};

}  // namespace peaky
