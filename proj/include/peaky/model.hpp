#pragma once

#include <string>
#include <vector>

namespace peaky {

enum class Scheme { Oopsk, Oofsk };
enum class Coherence { Coherent, Noncoherent };

std::string to_string(Scheme s);
std::string to_string(Coherence c);
Scheme parse_scheme(const std::string& text);
Coherence parse_coherence(const std::string& text);

/// On-off constellation: with probability 1 - nu nothing is sent, otherwise
/// one of M equiprobable PSK phases or FSK tones.
class ModulationSpec {
public:
    ModulationSpec(Scheme scheme, int M, double nu);

    Scheme scheme() const { return scheme_; }
    int M() const { return M_; }
    double nu() const { return nu_; }

    double peak_to_average_ratio() const { return 1.0 / nu_; }
    double off_prior() const { return 1.0 - nu_; }
    double on_prior() const { return nu_ / M_; }
    /// Priors of (s0, s1, ..., sM).
    std::vector<double> priors() const;
    /// PSK phase 2 pi (i - 1) / M of signal i, 1 <= i <= M.
    double phase(int i) const;
    /// True when nu lies below M/(M+1), the point where s0 stays in play as SNR -> 0.
    bool off_symbol_dominates() const { return nu_ < static_cast<double>(M_) / (M_ + 1); }

private:
    Scheme scheme_;
    int M_;
    double nu_;
};

/// Rician fading h ~ CN(d, gamma2). Only |d| is kept; the phase of d (or of h,
/// for coherent reception) is removed by derotation at the receiver.
class FadingSpec {
public:
    FadingSpec(Coherence regime, double d_mag, double gamma2);
    /// K = |d|^2/gamma2 (K may be +inf) and Omega = E|h|^2.
    static FadingSpec from_rician(Coherence regime, double K, double omega = 1.0);

    Coherence regime() const { return regime_; }
    double d_mag() const { return d_mag_; }
    double gamma2() const { return gamma2_; }
    double rician_k() const;
    double omega() const { return d_mag_ * d_mag_ + gamma2_; }

private:
    Coherence regime_;
    double d_mag_;
    double gamma2_;
};

/// Operating point. snr := P T / N0, so alpha^2 = snr / nu and
/// Eb/N0 = snr / H(nu) with the entropy H in bits.
struct LinkOperatingPoint {
    double snr;
    double alpha;
    double ebn0;

    static LinkOperatingPoint from_snr(double snr, const ModulationSpec& spec);
    static LinkOperatingPoint from_ebn0(double ebn0, const ModulationSpec& spec);
};

struct Scenario {
    ModulationSpec modulation;
    FadingSpec fading;
    LinkOperatingPoint link;
};

double alpha_from_snr(double snr, const ModulationSpec& spec);
double ebn0_from_snr(double snr, const ModulationSpec& spec);
double snr_from_ebn0(double ebn0, const ModulationSpec& spec);

double to_db(double ratio);
double from_db(double db);

/// Rician magnitude density with parameters (K, Omega):
/// f(r) = 2r(1+K)/Omega exp(-K - (1+K) r^2/Omega) I0(2r sqrt(K(1+K)/Omega)).
/// Requires a fading law with gamma2 > 0 (the pure-LOS law has no density).
double fading_magnitude_pdf(double r, const FadingSpec& fading);
double log_fading_magnitude_pdf(double r, const FadingSpec& fading);

/// Magnitude r_max with P(|h| > r_max) <= tail under the Rician law.
double fading_magnitude_upper(const FadingSpec& fading, double tail = 1e-12);

}  // namespace peaky
