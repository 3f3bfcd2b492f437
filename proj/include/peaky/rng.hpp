#pragma once

#include <array>
#include <cstdint>

namespace peaky {

/// Philox4x32-10 block function: a keyed bijection on 128-bit counters.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// Standard normal quantile (Wichura's AS241, about 1e-16 relative).
/// Requires 0 < p < 1.
double normal_quantile(double p);

/// splitmix64 finalizer, used to derive independent seeds from a base seed.
std::uint64_t splitmix64(std::uint64_t x);

/// Random draws for one simulated symbol. The stream is a pure function of
/// (seed, symbol), so any symbol can be regenerated in isolation.
class SymbolStream {
public:
    SymbolStream(std::uint64_t seed, std::uint64_t symbol);

    /// Uniform on the open interval (0, 1) with 53 random bits.
    double uniform();
    /// Standard normal by inversion.
    double normal() { return normal_quantile(uniform()); }

private:
    void refill();

    std::array<std::uint32_t, 2> key_;
    std::uint64_t symbol_;
    std::uint32_t block_ = 0;
    std::array<std::uint32_t, 4> buffer_{};
    int used_ = 4;
};

}  // namespace peaky
