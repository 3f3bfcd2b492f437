#include "peaky/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <vector>

#include <omp.h>

#include "peaky/detectors.hpp"
#include "peaky/errors.hpp"
#include "peaky/rng.hpp"

namespace peaky {

namespace {

using cplx = std::complex<double>;

struct ChunkTally {
    std::int64_t errors = 0;
    std::int64_t off_sent = 0;
    std::int64_t off_errors = 0;
    double energy = 0.0;
};

// Everything a chunk needs, fixed per operating point.
struct Kernel {
    Scheme scheme;
    Coherence regime;
    int M;
    double nu;
    double alpha;
    double d_mag;
    double gamma;
    double noise_sd;  // per real dimension
    std::vector<cplx> phasors;
    std::optional<NoncoherentOopskDetector> nc_oopsk;
    std::optional<NoncoherentOofskDetector> nc_oofsk;

    explicit Kernel(const Scenario& sc, double noise_scale)
        : scheme(sc.modulation.scheme()),
          regime(sc.fading.regime()),
          M(sc.modulation.M()),
          nu(sc.modulation.nu()),
          alpha(sc.link.alpha),
          d_mag(sc.fading.d_mag()),
          gamma(std::sqrt(sc.fading.gamma2())),
          noise_sd(noise_scale / std::numbers::sqrt2) {
        if (!(alpha > 0.0) || !std::isfinite(alpha)) throw DomainError("simulate: alpha must be > 0");
        if (!(noise_scale >= 0.0)) throw DomainError("simulate: noise_scale must be >= 0");
        for (int i = 1; i <= M; ++i) phasors.push_back(std::polar(1.0, sc.modulation.phase(i)));
        if (regime == Coherence::Noncoherent) {
            if (scheme == Scheme::Oopsk) {
                nc_oopsk.emplace(alpha, d_mag, sc.fading.gamma2(), M, nu);
            } else {
                nc_oofsk.emplace(alpha, d_mag, sc.fading.gamma2(), M, nu);
            }
        }
    }

    int draw_index(SymbolStream& rng) const {
        const double u = rng.uniform();
        const double off = 1.0 - nu;
        if (u < off) return 0;
        return std::min(M, 1 + static_cast<int>((u - off) / (nu / M)));
    }

    cplx draw_noise(SymbolStream& rng) const {
        const double re = rng.normal();
        const double im = rng.normal();
        return {noise_sd * re, noise_sd * im};
    }

    // Coherent: the magnitude follows the Rician law and the phase is uniform.
    // Noncoherent: h ~ CN(|d|, gamma2), already aligned with the phase of d.
    cplx draw_fading(SymbolStream& rng) const {
        const double re = rng.normal();
        const double im = rng.normal();
        const cplx h = cplx(d_mag, 0.0) + gamma / std::numbers::sqrt2 * cplx(re, im);
        if (regime == Coherence::Noncoherent) return h;
        const double phi = 2.0 * std::numbers::pi * rng.uniform();
        return std::polar(std::abs(h), phi);
    }

    int detect_symbol(SymbolStream& rng, int index, std::vector<double>& R) const {
        const cplx h = draw_fading(rng);
        if (scheme == Scheme::Oopsk) {
            cplx y = draw_noise(rng);
            if (index != 0) y += alpha * h * phasors[index - 1];
            return regime == Coherence::Coherent ? oopsk_coherent_detect(y, h, alpha, M, nu).index
                                                 : (*nc_oopsk)(y).index;
        }
        for (int m = 0; m < M; ++m) {
            cplx y = draw_noise(rng);
            if (m + 1 == index) y += alpha * h * phasors[index - 1];
            R[m] = std::norm(y);
        }
        return regime == Coherence::Coherent ? oofsk_coherent_detect(R, std::abs(h), alpha, M, nu).index
                                             : (*nc_oofsk)(R).index;
    }

    ChunkTally run_chunk(std::uint64_t seed, std::int64_t chunk, std::int64_t count) const {
        ChunkTally t;
        std::vector<double> R(static_cast<std::size_t>(M));
        const double energy = alpha * alpha;
        for (std::int64_t j = 0; j < count; ++j) {
            SymbolStream rng(seed, static_cast<std::uint64_t>(chunk * kChunkSize + j));
            const int index = draw_index(rng);
            const bool wrong = detect_symbol(rng, index, R) != index;
            t.errors += wrong;
            if (index == 0) {
                ++t.off_sent;
                t.off_errors += wrong;
            } else {
                t.energy += energy;
            }
        }
        return t;
    }
};

std::int64_t chunk_count(std::int64_t trials) {
    if (trials < 1) throw DomainError("simulate: trials must be >= 1");
    return (trials + kChunkSize - 1) / kChunkSize;
}

std::int64_t chunk_length(std::int64_t trials, std::int64_t chunk) {
    return std::min(kChunkSize, trials - chunk * kChunkSize);
}

SimulationResult reduce(const std::vector<ChunkTally>& tallies, std::int64_t trials,
                        std::uint64_t seed) {
    SimulationResult r;
    r.trials = trials;
    r.seed = seed;
    r.worker_chunks = static_cast<std::int64_t>(tallies.size());
    for (const auto& t : tallies) {
        r.errors += t.errors;
        r.off_sent += t.off_sent;
        r.off_errors += t.off_errors;
        r.energy_sum += t.energy;
    }
    r.pe_hat = static_cast<double>(r.errors) / static_cast<double>(trials);
    r.std_error = std::sqrt(r.pe_hat * (1.0 - r.pe_hat) / static_cast<double>(trials));
    return r;
}

}  // namespace

SimulationResult simulate(const Scenario& scenario, std::int64_t trials, std::uint64_t seed,
                          const SimulationOptions& options) {
    const std::int64_t chunks = chunk_count(trials);
    const Kernel kernel(scenario, options.noise_scale);
    std::vector<ChunkTally> tallies(static_cast<std::size_t>(chunks));
    const int workers = options.workers > 0 ? options.workers : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(workers)
    for (std::int64_t c = 0; c < chunks; ++c) {
        tallies[static_cast<std::size_t>(c)] = kernel.run_chunk(seed, c, chunk_length(trials, c));
    }
    return reduce(tallies, trials, seed);
}

SimulationResult simulate_serial(const Scenario& scenario, std::int64_t trials, std::uint64_t seed,
                                 const SimulationOptions& options) {
    const std::int64_t chunks = chunk_count(trials);
    const Kernel kernel(scenario, options.noise_scale);
    std::vector<ChunkTally> tallies;
    tallies.reserve(static_cast<std::size_t>(chunks));
    for (std::int64_t c = 0; c < chunks; ++c) {
        tallies.push_back(kernel.run_chunk(seed, c, chunk_length(trials, c)));
    }
    return reduce(tallies, trials, seed);
}

}  // namespace peaky
