#include "peaky/exponents.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <omp.h>

#include "peaky/errors.hpp"
#include "peaky/quadrature.hpp"
#include "peaky/rng.hpp"
#include "peaky/specfun.hpp"

namespace peaky {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
const double kLogPi = std::log(std::numbers::pi);

// Relative agreement required between a quadrature and its refinement.
constexpr double kRefineTol = 1e-11;
constexpr int kMaxRefinements = 3;

// Chunk size for the Monte Carlo integration (same role as in the simulator).
constexpr std::int64_t kSampleChunk = std::int64_t{1} << 16;

// Received-signal law given the hypothesis s_i: mean mu e^{j theta_i} and
// complex variance s (s = 1 when the receiver knows h).
struct Law {
    Scheme scheme;
    int M;
    double nu;
    double mu;
    double s;
};

Law law_for(const Scenario& sc, double h_mag) {
    const double a = sc.link.alpha;
    if (sc.fading.regime() == Coherence::Coherent) {
        return {sc.modulation.scheme(), sc.modulation.M(), sc.modulation.nu(), a * h_mag, 1.0};
    }
    return {sc.modulation.scheme(), sc.modulation.M(), sc.modulation.nu(), a * sc.fading.d_mag(),
            1.0 + a * a * sc.fading.gamma2()};
}

struct LogPriors {
    bool has_off;
    double off;
    double on;
};

LogPriors log_priors(const Law& law) {
    return {law.nu < 1.0, law.nu < 1.0 ? std::log1p(-law.nu) : kNegInf, std::log(law.nu / law.M)};
}

// ln sum_j exp(v_j)
double log_sum_exp(const double* v, int n) {
    double top = kNegInf;
    for (int j = 0; j < n; ++j) top = std::max(top, v[j]);
    if (top == kNegInf) return kNegInf;
    double s = 0.0;
    for (int j = 0; j < n; ++j) s += std::exp(v[j] - top);
    return top + std::log(s);
}

int thread_count(const ExponentOptions& o) {
    if (o.serial) return 1;
    return o.workers > 0 ? o.workers : omp_get_max_threads();
}

// Runs row(r, out) for every row (out has one slot per rho) and adds the rows
// up in row order, so the result does not depend on the thread count.
template <class RowFn>
std::vector<double> sum_rows(int rows, int width, const ExponentOptions& o, const RowFn& row) {
    std::vector<double> table(static_cast<std::size_t>(rows) * width, 0.0);
    const int workers = thread_count(o);
#pragma omp parallel for schedule(dynamic) num_threads(workers) if (!o.serial)
    for (int r = 0; r < rows; ++r) row(r, &table[static_cast<std::size_t>(r) * width]);
    std::vector<double> out(static_cast<std::size_t>(width));
    for (int k = 0; k < width; ++k) {
        CompensatedSum s;
        for (int r = 0; r < rows; ++r) s.add(table[static_cast<std::size_t>(r) * width + k]);
        out[static_cast<std::size_t>(k)] = s.value();
    }
    return out;
}

// --- OOPSK: integral over the complex plane in polar coordinates ------------
// The integrand is periodic in the angle with period 2 pi / M, so one period
// is integrated with the trapezoidal rule and the radius with panels of
// 16-point Gauss-Legendre.

std::vector<double> oopsk_integrals(const Law& law, const std::vector<double>& rhos, int panels,
                                    int per_period, const ExponentOptions& o) {
    const int M = law.M;
    const auto pri = log_priors(law);
    const double r_max = law.mu + 12.0 * std::sqrt(law.s / 2.0);
    const auto& rule = gauss_legendre(16);
    const double width = r_max / panels;
    const double dphi = 2.0 * std::numbers::pi / M / per_period;
    const int nr = static_cast<int>(rhos.size());

    // cos(phi_k - theta_i) for the angular nodes of one period.
    std::vector<double> cosines(static_cast<std::size_t>(per_period) * M);
    for (int k = 0; k < per_period; ++k) {
        const double phi = (k + 0.5) * dphi;
        for (int i = 0; i < M; ++i) {
            cosines[static_cast<std::size_t>(k) * M + i] = std::cos(phi - 2.0 * std::numbers::pi * i / M);
        }
    }

    auto row = [&](int r, double* out) {
        const int p = r / 16;
        const int q = r % 16;
        const double radius = width * (p + 0.5 * (1.0 + rule.nodes[q]));
        const double weight = 0.5 * width * rule.weights[q] * radius * (2.0 * std::numbers::pi / per_period);
        std::vector<double> lf(static_cast<std::size_t>(M) + 1);
        std::vector<double> terms(static_cast<std::size_t>(M) + 1);
        const double r2 = radius * radius;
        for (int k = 0; k < per_period; ++k) {
            lf[0] = -kLogPi - r2;
            for (int i = 0; i < M; ++i) {
                const double c = cosines[static_cast<std::size_t>(k) * M + i];
                lf[i + 1] = -kLogPi - std::log(law.s) -
                            (r2 + law.mu * law.mu - 2.0 * radius * law.mu * c) / law.s;
            }
            for (int j = 0; j < nr; ++j) {
                const double rho = rhos[static_cast<std::size_t>(j)];
                const double beta = 1.0 / (1.0 + rho);
                int n = 0;
                if (pri.has_off) terms[n++] = pri.off + beta * lf[0];
                for (int i = 1; i <= M; ++i) terms[n++] = pri.on + beta * lf[i];
                out[j] += weight * std::exp((1.0 + rho) * log_sum_exp(terms.data(), n));
            }
        }
    };
    return sum_rows(panels * 16, nr, o, row);
}

std::vector<E0Estimate> oopsk_e0(const Law& law, const std::vector<double>& rhos,
                                 const ExponentOptions& o) {
    const double r_max = law.mu + 12.0 * std::sqrt(law.s / 2.0);
    const double kappa = 2.0 * r_max * law.mu / law.s;
    int panels = std::max(4, static_cast<int>(std::ceil(r_max)));
    int per_period = std::max(4, static_cast<int>(std::ceil((kappa + 10.0 * std::sqrt(kappa) + 30.0) / law.M)));

    auto coarse = oopsk_integrals(law, rhos, panels, per_period, o);
    for (int attempt = 0;; ++attempt) {
        panels *= 2;
        per_period *= 2;
        auto fine = oopsk_integrals(law, rhos, panels, per_period, o);
        double change = 0.0;
        for (std::size_t j = 0; j < rhos.size(); ++j) {
            change = std::max(change, std::abs(std::log(fine[j] / coarse[j])));
        }
        if (change <= kRefineTol) {
            std::vector<E0Estimate> out;
            for (double v : fine) out.push_back({-std::log(v), 0.0});
            return out;
        }
        if (attempt + 1 >= kMaxRefinements) throw NumericError("e0: polar quadrature did not converge");
        coarse = std::move(fine);
    }
}

// --- OOFSK: energies R_m; under s0 they are i.i.d. Exp(1) and under s_i the
// i-th one has likelihood ratio L(x) = (1/s) e^{x - (x + mu^2)/s} I0(2 mu sqrt(x)/s).

double log_likelihood_ratio(const Law& law, double x) {
    const double lambda = law.mu * law.mu;
    return -std::log(law.s) + x - (x + lambda) / law.s + log_bessel_i0(2.0 * law.mu * std::sqrt(x) / law.s);
}

// ln of (sum_j p_j f_j^beta)^{1+rho} / f_0 given ln L_m for every bin.
double log_mixture_power(const LogPriors& pri, const double* log_l, int M, double rho,
                         std::vector<double>& terms) {
    const double beta = 1.0 / (1.0 + rho);
    int n = 0;
    if (pri.has_off) terms[static_cast<std::size_t>(n++)] = pri.off;
    for (int m = 0; m < M; ++m) terms[static_cast<std::size_t>(n++)] = pri.on + beta * log_l[m];
    return (1.0 + rho) * log_sum_exp(terms.data(), n);
}

// Tensor Gauss-Legendre over u_m = sqrt(R_m) in [0, u_max]^M. With W the
// product of node weights (e^{-R} included), the integrand W (p_off + p_on sum L_m^beta)^{1+rho}
// equals (p_off prod c_m + p_on sum_i d_i prod_{m != i} c_m)^{1+rho}, c = w^beta, d = (w L)^beta,
// and both factors stay bounded. The integrand is symmetric in the bins, so only
// sorted index tuples are visited, each weighted by its number of permutations.
std::vector<double> oofsk_tensor_integrals(const Law& law, const std::vector<double>& rhos, int panels,
                                           const ExponentOptions& o) {
    const int M = law.M;
    const auto pri = log_priors(law);
    const double p_off = pri.has_off ? std::exp(pri.off) : 0.0;
    const double p_on = std::exp(pri.on);
    const double u_max = law.mu + 12.0 * std::sqrt(law.s / 2.0);
    const auto& rule = gauss_legendre(10);
    const double width = u_max / panels;
    const int n = panels * 10;
    const int nr = static_cast<int>(rhos.size());
    std::vector<double> c(static_cast<std::size_t>(nr * n)), d(c.size());
    for (int k = 0; k < n; ++k) {
        const double u = width * (k / 10 + 0.5 * (1.0 + rule.nodes[k % 10]));
        const double log_w = std::log(0.5 * width * rule.weights[k % 10] * 2.0 * u) - u * u;
        const double log_l = log_likelihood_ratio(law, u * u);
        for (int j = 0; j < nr; ++j) {
            const double beta = 1.0 / (1.0 + rhos[j]);
            c[static_cast<std::size_t>(j * n + k)] = std::exp(beta * log_w);
            d[static_cast<std::size_t>(j * n + k)] = std::exp(beta * (log_w + log_l));
        }
    }
    double factorial = 1.0;
    for (int m = 2; m <= M; ++m) factorial *= m;

    auto row = [&](int first, double* out) {
        std::vector<int> idx(static_cast<std::size_t>(M), first);
        while (true) {
            double mult = factorial;
            for (int m = 1, run = 1; m <= M; ++m) {
                if (m < M && idx[m] == idx[m - 1]) {
                    mult /= ++run;
                } else {
                    run = 1;
                }
            }
            for (int j = 0; j < nr; ++j) {
                const double* cj = c.data() + j * n;
                const double* dj = d.data() + j * n;
                double prod = 1.0, sum = 0.0;
                for (int i = 0; i < M; ++i) {
                    double t = dj[idx[i]];
                    for (int m = 0; m < M; ++m) {
                        if (m != i) t *= cj[idx[m]];
                    }
                    sum += t;
                    prod *= cj[idx[i]];
                }
                const double base = p_off * prod + p_on * sum;
                if (base > 0.0) out[j] += mult * std::exp((1.0 + rhos[j]) * std::log(base));
            }
            int m = M - 1;
            while (m >= 1 && idx[m] == n - 1) --m;
            if (m < 1) break;
            ++idx[m];
            for (int r = m + 1; r < M; ++r) idx[r] = idx[m];
        }
    };
    return sum_rows(n, nr, o, row);
}

std::vector<E0Estimate> oofsk_tensor_e0(const Law& law, const std::vector<double>& rhos,
                                        const ExponentOptions& o) {
    if (law.M > 3) throw DomainError("e0: tensor quadrature supports M <= 3");
    const double u_max = law.mu + 12.0 * std::sqrt(law.s / 2.0);
    int panels = std::max(4, static_cast<int>(std::ceil(u_max / 0.75)));
    auto coarse = oofsk_tensor_integrals(law, rhos, panels, o);
    for (int attempt = 0;; ++attempt) {
        panels *= 2;
        auto fine = oofsk_tensor_integrals(law, rhos, panels, o);
        double change = 0.0;
        for (std::size_t j = 0; j < rhos.size(); ++j) {
            change = std::max(change, std::abs(std::log(fine[j] / coarse[j])));
        }
        if (change <= kRefineTol) {
            std::vector<E0Estimate> out;
            for (double v : fine) out.push_back({-std::log(v), 0.0});
            return out;
        }
        if (attempt + 1 >= kMaxRefinements) throw NumericError("e0: tensor quadrature did not converge");
        coarse = std::move(fine);
    }
}

// Stratified importance sampling with the equal-weight hypothesis mixture as
// proposal. Stratum 0 draws from f_0, stratum 1 from f_1 (all s_i, i >= 1, are
// equivalent by symmetry). E0 is estimated as -ln(I(rho) / I(0)) with common
// random numbers, so E0(0) = 0 exactly.
std::vector<E0Estimate> oofsk_monte_carlo_e0(const Law& law, const std::vector<double>& rhos,
                                             const ExponentOptions& o) {
    const int M = law.M;
    const auto pri = log_priors(law);
    const std::int64_t total = o.mc_samples;
    if (total < 2 * (M + 1)) throw DomainError("e0: too few Monte Carlo samples");
    const std::int64_t n0 = std::max<std::int64_t>(1, total / (M + 1));
    const std::int64_t n1 = total - n0;
    const double pi0 = 1.0 / (M + 1);
    const double pi1 = 1.0 - pi0;
    const double log_mp1 = std::log(static_cast<double>(M + 1));

    // Per chunk, per stratum, per rho: sum a, sum a^2, sum a b, with b = a at rho = 0.
    const int nr = static_cast<int>(rhos.size());
    const int slots = 2 * (3 * nr + 2);  // + sum b, sum b^2 per stratum
    const std::int64_t chunks = (total + kSampleChunk - 1) / kSampleChunk;
    auto row = [&](int c, double* out) {
        std::vector<double> log_l(static_cast<std::size_t>(M));
        std::vector<double> terms(static_cast<std::size_t>(M) + 1);
        std::vector<double> denom(static_cast<std::size_t>(M) + 1);
        const std::int64_t begin = c * kSampleChunk;
        const std::int64_t end = std::min(total, begin + kSampleChunk);
        for (std::int64_t g = begin; g < end; ++g) {
            SymbolStream rng(o.mc_seed, static_cast<std::uint64_t>(g));
            const int stratum = g < n0 ? 0 : 1;
            for (int m = 0; m < M; ++m) {
                const double re = rng.normal() * std::sqrt(0.5);
                const double im = rng.normal() * std::sqrt(0.5);
                double x;
                if (stratum == 1 && m == 0) {
                    const double yr = law.mu + std::sqrt(law.s) * re;
                    const double yi = std::sqrt(law.s) * im;
                    x = yr * yr + yi * yi;
                } else {
                    x = re * re + im * im;
                }
                log_l[static_cast<std::size_t>(m)] = log_likelihood_ratio(law, x);
            }
            denom[0] = 0.0;
            for (int m = 0; m < M; ++m) denom[static_cast<std::size_t>(m) + 1] = log_l[static_cast<std::size_t>(m)];
            const double log_q = log_sum_exp(denom.data(), M + 1);
            const double b = std::exp(log_mp1 + log_mixture_power(pri, log_l.data(), M, 0.0, terms) - log_q);
            double* slot = out + stratum * (3 * nr + 2);
            for (int j = 0; j < nr; ++j) {
                const double a =
                    std::exp(log_mp1 + log_mixture_power(pri, log_l.data(), M, rhos[j], terms) - log_q);
                slot[3 * j] += a;
                slot[3 * j + 1] += a * a;
                slot[3 * j + 2] += a * b;
            }
            slot[3 * nr] += b;
            slot[3 * nr + 1] += b * b;
        }
    };
    const auto sums = sum_rows(static_cast<int>(chunks), slots, o, row);

    const double n[2] = {static_cast<double>(n0), static_cast<double>(n1)};
    const double weight[2] = {pi0, pi1};
    auto at = [&](int stratum, int k) { return sums[static_cast<std::size_t>(stratum * (3 * nr + 2) + k)]; };
    double ib = 0.0, var_b = 0.0;
    for (int t = 0; t < 2; ++t) {
        const double mb = at(t, 3 * nr) / n[t];
        ib += weight[t] * mb;
        var_b += weight[t] * weight[t] * (at(t, 3 * nr + 1) / n[t] - mb * mb) / (n[t] - 1.0);
    }
    std::vector<E0Estimate> out;
    for (int j = 0; j < nr; ++j) {
        double ia = 0.0, var_a = 0.0, cov = 0.0;
        for (int t = 0; t < 2; ++t) {
            const double ma = at(t, 3 * j) / n[t];
            const double mb = at(t, 3 * nr) / n[t];
            ia += weight[t] * ma;
            var_a += weight[t] * weight[t] * (at(t, 3 * j + 1) / n[t] - ma * ma) / (n[t] - 1.0);
            cov += weight[t] * weight[t] * (at(t, 3 * j + 2) / n[t] - ma * mb) / (n[t] - 1.0);
        }
        const double var = var_a / (ia * ia) + var_b / (ib * ib) - 2.0 * cov / (ia * ib);
        out.push_back({-std::log(ia / ib), std::sqrt(std::max(0.0, var))});
    }
    return out;
}

std::vector<E0Estimate> e0_for_law(const Law& law, const std::vector<double>& rhos,
                                   const ExponentOptions& o) {
    for (double rho : rhos) {
        if (!(rho >= 0.0 && rho <= 1.0)) throw DomainError("e0: rho must lie in [0, 1]");
    }
    if (law.scheme == Scheme::Oopsk) return oopsk_e0(law, rhos, o);
    const bool quadrature = o.method == E0Method::Quadrature ||
                            (o.method == E0Method::Auto && law.M <= 3);
    return quadrature ? oofsk_tensor_e0(law, rhos, o) : oofsk_monte_carlo_e0(law, rhos, o);
}

// Fading-magnitude nodes and weights (density included) for coherent averages.
struct FadingNodes {
    std::vector<double> r;
    std::vector<double> w;
};

FadingNodes fading_nodes(const FadingSpec& fading, int n) {
    if (n < 1) throw DomainError("fading_nodes must be >= 1");
    if (fading.gamma2() == 0.0) return {{fading.d_mag()}, {1.0}};
    const double r_max = fading_magnitude_upper(fading);
    const auto& rule = gauss_legendre(n);
    FadingNodes out;
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
        const double r = 0.5 * r_max * (1.0 + rule.nodes[k]);
        out.r.push_back(r);
        out.w.push_back(0.5 * r_max * rule.weights[k] * fading_magnitude_pdf(r, fading));
    }
    return out;
}

// Barycentric interpolant of E0 on Chebyshev-Lobatto points of [0, 1].
class E0Interpolant {
public:
    explicit E0Interpolant(int nodes) {
        if (nodes < 3) throw DomainError("interpolation_nodes must be >= 3");
        const int n = nodes - 1;
        for (int k = 0; k <= n; ++k) {
            rho_.push_back(0.5 * (1.0 - std::cos(std::numbers::pi * k / n)));
            double w = k % 2 == 0 ? 1.0 : -1.0;
            if (k == 0 || k == n) w *= 0.5;
            weight_.push_back(w);
        }
        rho_.front() = 0.0;
        rho_.back() = 1.0;
    }

    const std::vector<double>& nodes() const { return rho_; }
    void set_values(std::vector<double> v) { value_ = std::move(v); }

    double operator()(double rho) const {
        double num = 0.0, den = 0.0;
        for (std::size_t k = 0; k < rho_.size(); ++k) {
            const double d = rho - rho_[k];
            if (d == 0.0) return value_[k];
            num += weight_[k] * value_[k] / d;
            den += weight_[k] / d;
        }
        return num / den;
    }

    double slope_at_zero() const {
        double s = 0.0;
        for (std::size_t k = 1; k < rho_.size(); ++k) {
            s += weight_[k] / weight_[0] * (value_[k] - value_[0]) / (rho_[0] - rho_[k]);
        }
        return s;
    }

private:
    std::vector<double> rho_;
    std::vector<double> weight_;
    std::vector<double> value_;
};

ExponentPoint maximize(const E0Interpolant& e0, double rate, double rho_tol) {
    // E0 is concave, so past its slope at 0 the objective peaks at rho = 0.
    if (rate >= e0.slope_at_zero()) return {rate, 0.0, 0.0};
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    auto objective = [&](double rho) { return e0(rho) - rho * rate; };
    double a = 0.0, b = 1.0;
    double x1 = b - invphi * (b - a), x2 = a + invphi * (b - a);
    double f1 = objective(x1), f2 = objective(x2);
    while (b - a > rho_tol) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + invphi * (b - a);
            f2 = objective(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - invphi * (b - a);
            f1 = objective(x1);
        }
    }
    ExponentPoint best{rate, f1 >= f2 ? f1 : f2, f1 >= f2 ? x1 : x2};
    for (double edge : {0.0, 1.0}) {
        const double f = objective(edge);
        if (f >= best.exponent) best = {rate, f, edge};
    }
    best.exponent = std::max(0.0, best.exponent);
    return best;
}

}  // namespace

// E0 interpolants and reporting-grid values for each channel law in play.
struct ExponentModel::Tables {
    std::vector<double> weight;
    std::vector<E0Interpolant> interpolant;
    std::vector<std::vector<E0Estimate>> grid;
};

namespace {

ExponentModel::Tables build_tables(const Scenario& sc, const ExponentOptions& o) {
    const auto grid = rho_grid(o.rho_points);
    E0Interpolant proto(o.interpolation_nodes);
    std::vector<double> rhos = proto.nodes();
    rhos.insert(rhos.end(), grid.begin(), grid.end());

    std::vector<double> mags{0.0};
    std::vector<double> weights{1.0};
    if (sc.fading.regime() == Coherence::Coherent) {
        auto nodes = fading_nodes(sc.fading, o.fading_nodes);
        mags = nodes.r;
        weights = nodes.w;
    }
    ExponentModel::Tables t;
    for (std::size_t k = 0; k < mags.size(); ++k) {
        const auto values = e0_for_law(law_for(sc, mags[k]), rhos, o);
        E0Interpolant interp = proto;
        std::vector<double> at_nodes;
        for (std::size_t j = 0; j < proto.nodes().size(); ++j) at_nodes.push_back(values[j].value);
        interp.set_values(std::move(at_nodes));
        t.interpolant.push_back(std::move(interp));
        t.grid.emplace_back(values.begin() + static_cast<std::ptrdiff_t>(proto.nodes().size()), values.end());
        t.weight.push_back(weights[k]);
    }
    return t;
}

}  // namespace

std::vector<double> rho_grid(int n) {
    if (n < 2) throw DomainError("rho grid needs at least 2 points");
    std::vector<double> g;
    for (int k = 0; k < n; ++k) g.push_back(static_cast<double>(k) / (n - 1));
    return g;
}

std::vector<E0Estimate> e0_batch_given_h(const std::vector<double>& rhos, const Scenario& sc,
                                         double h_mag, const ExponentOptions& o) {
    if (!(h_mag >= 0.0)) throw DomainError("e0: |h| must be >= 0");
    return e0_for_law(law_for(sc, h_mag), rhos, o);
}

std::vector<E0Estimate> e0_batch(const std::vector<double>& rhos, const Scenario& sc,
                                 const ExponentOptions& o) {
    if (sc.fading.regime() == Coherence::Noncoherent) return e0_for_law(law_for(sc, 0.0), rhos, o);
    const auto nodes = fading_nodes(sc.fading, o.fading_nodes);
    std::vector<E0Estimate> avg(rhos.size());
    for (std::size_t k = 0; k < nodes.r.size(); ++k) {
        const auto v = e0_for_law(law_for(sc, nodes.r[k]), rhos, o);
        for (std::size_t j = 0; j < rhos.size(); ++j) {
            avg[j].value += nodes.w[k] * v[j].value;
            avg[j].std_error += nodes.w[k] * v[j].std_error;
        }
    }
    return avg;
}

E0Estimate e0(double rho, const Scenario& sc, const ExponentOptions& o) {
    return e0_batch({rho}, sc, o).front();
}

ExponentModel::ExponentModel(const Scenario& sc, const ExponentOptions& o)
    : tables_(std::make_shared<const Tables>(build_tables(sc, o))), options_(o) {
    if (!(o.rho_tol > 0.0)) throw DomainError("rho_tol must be > 0");
}

ExponentCurve ExponentModel::curve(const std::vector<double>& rates) const {
    if (rates.empty()) throw DomainError("exponent_curve: rate grid is empty");
    for (std::size_t i = 0; i < rates.size(); ++i) {
        if (!(rates[i] >= 0.0) || !std::isfinite(rates[i])) throw DomainError("rates must be finite and >= 0");
        if (i > 0 && !(rates[i] > rates[i - 1])) throw DomainError("rates must be strictly increasing");
    }
    const auto& t = *tables_;
    const auto grid = rho_grid(options_.rho_points);

    ExponentCurve curve;
    for (double rate : rates) {
        ExponentPoint p{rate, 0.0, 0.0};
        for (std::size_t k = 0; k < t.weight.size(); ++k) {
            const auto q = maximize(t.interpolant[k], rate, options_.rho_tol);
            p.exponent += t.weight[k] * q.exponent;
            p.rho_star += t.weight[k] * q.rho_star;
        }
        p.rho_star = std::clamp(p.rho_star, 0.0, 1.0);
        curve.points.push_back(p);
    }
    for (std::size_t j = 0; j < grid.size(); ++j) {
        double v = 0.0, se = 0.0;
        for (std::size_t k = 0; k < t.weight.size(); ++k) {
            v += t.weight[k] * t.grid[k][j].value;
            se += t.weight[k] * t.grid[k][j].std_error;
        }
        curve.e0_grid.emplace_back(grid[j], v);
        curve.integration_stderr = std::max(curve.integration_stderr, se);
    }
    return curve;
}

double ExponentModel::slope_at_zero() const {
    const auto& t = *tables_;
    double s = 0.0;
    for (std::size_t k = 0; k < t.weight.size(); ++k) s += t.weight[k] * t.interpolant[k].slope_at_zero();
    return s;
}

ExponentCurve exponent_curve(const std::vector<double>& rates, const Scenario& sc,
                             const ExponentOptions& o) {
    return ExponentModel(sc, o).curve(rates);
}

ExponentPoint error_exponent(double rate, const Scenario& sc, const ExponentOptions& o) {
    return exponent_curve({rate}, sc, o).points.front();
}

double ExponentModel::zero_exponent_rate() const {
    const auto& t = *tables_;
    double s = 0.0;
    for (const auto& interp : t.interpolant) s = std::max(s, interp.slope_at_zero());
    return s;
}

double e0_slope_at_zero(const Scenario& sc, const ExponentOptions& o) {
    return ExponentModel(sc, o).slope_at_zero();
}

}  // namespace peaky
