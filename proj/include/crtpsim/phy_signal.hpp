#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "crtpsim/error.hpp"

namespace crtpsim {

// Complex-baseband sample buffer.
struct Signal {
  std::vector<std::complex<double>> samples;
  double sample_rate = 0.0;  // samples/s
};

// Discretized probability density: probabilities[i] is the mass of
// [bin_edges[i], bin_edges[i+1]).
struct EmpiricalDistribution {
  std::vector<double> bin_edges;
  std::vector<double> probabilities;
};

// Averaged periodogram, bin_frequencies centered on 0 Hz.
struct Spectrum {
  std::vector<double> bin_frequencies;
  std::vector<double> power;
};

inline constexpr std::size_t kDefaultBins = 64;

// Complex white Gaussian noise, E|s|^2 = amplitude^2 (real and imaginary
// parts i.i.d. normal with std-dev amplitude/sqrt(2)). Deterministic per seed.
Signal gaussian_noise(double sample_rate, double duration, double amplitude,
                      std::uint64_t seed);

// samples[n] = amplitude * exp(i*2*pi*freq_offset*n/sample_rate)
Signal single_tone(double freq_offset, double sample_rate, double duration,
                   double amplitude);

Signal superpose(const Signal& x, const Signal& interferer);

// 10*log10(||x||^2 / ||j||^2). Returns +inf when the interferer is silent.
double snr_db(const Signal& x, const Signal& j);

// Amplitude scaling by 10^(gain/20).
Signal apply_gain_db(const Signal& s, double gain_db);

// Linear-phase Hamming windowed-sinc low-pass. Passband edge at cutoff_hz,
// stopband edge at cutoff_hz + transition_hz with >= 40 dB attenuation.
Signal fir_lowpass(const Signal& s, double cutoff_hz, double transition_hz);
std::vector<double> lowpass_taps(double sample_rate, double cutoff_hz,
                                 double transition_hz);

// Periodogram averaged over consecutive non-overlapping fft_size windows.
// Sum of power equals the mean time-domain power of the consumed samples.
Spectrum power_spectrum(const Signal& s, std::size_t fft_size);

double mean_power(const Signal& s);

// Equal-width bins spanning [min, max] of the samples.
EmpiricalDistribution histogram(std::span<const double> samples,
                                std::size_t bins);

// -sum p*log2(p) over nonzero bins.
double discrete_entropy(const EmpiricalDistribution& d);

// Differential form: discrete term plus the log2(bin width) correction.
double estimate_entropy(const EmpiricalDistribution& d);

// Joint-histogram estimate of I(X:Y) in bits; requires len >= 10*bins^2.
double estimate_mutual_information(std::span<const double> x,
                                   std::span<const double> y,
                                   std::size_t bins);

// I_s = I(X:Y) - H(X) with H(X) the discrete entropy of the binned x,
// so an identity channel scores ~0.
double scanned_information(std::span<const double> x,
                           std::span<const double> y, std::size_t bins);

void write_spectrum_csv(const Spectrum& s, std::ostream& out);
void write_signal_csv(const Signal& s, std::ostream& out);

}  // namespace crtpsim
