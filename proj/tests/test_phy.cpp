#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "crtpsim/phy_signal.hpp"
#include "crtpsim/rng.hpp"
#include "test_util.hpp"

using namespace crtpsim;
using crtpsim::test::error_code_of;

namespace {

// O(n^2) DFT periodogram, the independent oracle for power_spectrum.
std::vector<double> naive_periodogram(const std::vector<std::complex<double>>& x) {
  const std::size_t n = x.size();
  std::vector<double> p(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::complex<double> acc{0.0, 0.0};
    for (std::size_t m = 0; m < n; ++m) {
      const double angle = -2.0 * std::numbers::pi *
                           static_cast<double>(k) * static_cast<double>(m) /
                           static_cast<double>(n);
      acc += x[m] * std::complex<double>(std::cos(angle), std::sin(angle));
    }
    p[k] = std::norm(acc) / (static_cast<double>(n) * static_cast<double>(n));
  }
  return p;
}

std::size_t bin_nearest(const Spectrum& s, double freq) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < s.bin_frequencies.size(); ++i) {
    if (std::abs(s.bin_frequencies[i] - freq) <
        std::abs(s.bin_frequencies[best] - freq)) {
      best = i;
    }
  }
  return best;
}

std::size_t peak_bin(const Spectrum& s) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < s.power.size(); ++i) {
    if (s.power[i] > s.power[best]) best = i;
  }
  return best;
}

// attenuation of a tone through the filter, measured in its spectral bin so
// that leakage and edge transients cancel out
double tone_attenuation_db(const Signal& tone, double freq, double cutoff,
                           double transition, std::size_t fft) {
  const Signal filtered = fir_lowpass(tone, cutoff, transition);
  const Spectrum before = power_spectrum(tone, fft);
  const Spectrum after = power_spectrum(filtered, fft);
  const std::size_t bin = bin_nearest(before, freq);
  return 10.0 * std::log10(before.power[bin] / after.power[bin]);
}

std::vector<double> gaussian_reals(std::size_t n, double sigma,
                                   std::uint64_t seed) {
  RandomStream rng(seed);
  std::vector<double> out(n);
  for (double& v : out) v = sigma * rng.normal();
  return out;
}

}  // namespace

TEST_CASE("gaussian_noise basics") {
  Signal s = gaussian_noise(10e6, 0.001, 1.0, 42);
  CHECK(s.samples.size() == 10000);
  CHECK(s.sample_rate == 10e6);

  Signal again = gaussian_noise(10e6, 0.001, 1.0, 42);
  CHECK(s.samples == again.samples);  // deterministic per seed

  Signal other = gaussian_noise(10e6, 0.001, 1.0, 43);
  CHECK(s.samples != other.samples);

  Signal silent = gaussian_noise(10e6, 0.001, 0.0, 42);
  for (const auto& z : silent.samples) CHECK(z == std::complex<double>{});

  // E|s|^2 = amplitude^2
  Signal big = gaussian_noise(1e6, 0.2, 2.0, 7);
  CHECK(mean_power(big) == doctest::Approx(4.0).epsilon(0.02));
}

TEST_CASE("single_tone") {
  Signal dc = single_tone(0.0, 10e6, 0.0001, 0.5);
  for (const auto& z : dc.samples) {
    CHECK(z.real() == doctest::Approx(0.5));
    CHECK(std::abs(z.imag()) < 1e-12);
  }

  Signal tone = single_tone(1e6, 10e6, 0.01, 2.0);
  for (std::size_t i = 0; i < tone.samples.size(); i += 997) {
    CHECK(std::abs(tone.samples[i]) == doctest::Approx(2.0).epsilon(1e-12));
  }

  Spectrum spec = power_spectrum(tone, 1024);
  CHECK(peak_bin(spec) == bin_nearest(spec, 1e6));

  CHECK(error_code_of([] { single_tone(5e6, 10e6, 0.001, 1.0); }) ==
        ErrorCode::AliasedFrequency);
  CHECK(error_code_of([] { single_tone(-6e6, 10e6, 0.001, 1.0); }) ==
        ErrorCode::AliasedFrequency);
}

TEST_CASE("superpose") {
  Signal x = gaussian_noise(1e6, 0.01, 1.0, 1);
  Signal zero = gaussian_noise(1e6, 0.01, 0.0, 2);
  Signal j = gaussian_noise(1e6, 0.01, 0.5, 3);

  CHECK(superpose(x, zero).samples == x.samples);  // j = 0 degenerate case

  Signal xy = superpose(x, j);
  Signal yx = superpose(j, x);
  CHECK(xy.samples == yx.samples);

  Signal shorter = x;
  shorter.samples.pop_back();
  CHECK(error_code_of([&] { superpose(x, shorter); }) ==
        ErrorCode::LengthMismatch);

  Signal wrong_rate = x;
  wrong_rate.sample_rate = 2e6;
  CHECK(error_code_of([&] { superpose(x, wrong_rate); }) ==
        ErrorCode::RateMismatch);
}

TEST_CASE("snr_db") {
  Signal x = single_tone(1e5, 1e6, 0.01, 1.0);
  Signal j = single_tone(2e5, 1e6, 0.01, 1.0);
  CHECK(snr_db(x, j) == doctest::Approx(0.0).epsilon(1e-9));

  Signal weak = single_tone(2e5, 1e6, 0.01, 0.1);
  CHECK(snr_db(x, weak) == doctest::Approx(20.0).epsilon(1e-9));

  // antisymmetry and common-scaling invariance on random pairs
  std::mt19937_64 seeds(5);
  for (int i = 0; i < 50; ++i) {
    Signal a = gaussian_noise(1e6, 0.001, 1.0 + (seeds() % 100) / 50.0, seeds());
    Signal b = gaussian_noise(1e6, 0.001, 0.1 + (seeds() % 100) / 25.0, seeds());
    const double ab = snr_db(a, b);
    CHECK(ab == doctest::Approx(-snr_db(b, a)).epsilon(1e-12));
    Signal a3 = apply_gain_db(a, 9.54);
    Signal b3 = apply_gain_db(b, 9.54);
    CHECK(snr_db(a3, b3) == doctest::Approx(ab).epsilon(1e-9));
  }

  Signal silent = gaussian_noise(1e6, 0.01, 0.0, 9);
  CHECK(std::isinf(snr_db(x, silent)));
  CHECK(snr_db(x, silent) > 0);
}

TEST_CASE("apply_gain_db") {
  Signal x = gaussian_noise(1e6, 0.002, 1.0, 21);
  CHECK(apply_gain_db(x, 0.0).samples == x.samples);

  Signal up = apply_gain_db(x, 20.0);
  CHECK(std::abs(up.samples[5]) ==
        doctest::Approx(10.0 * std::abs(x.samples[5])).epsilon(1e-12));

  Signal back = apply_gain_db(apply_gain_db(x, 14.0), -14.0);
  for (std::size_t i = 0; i < x.samples.size(); i += 199) {
    CHECK(std::abs(back.samples[i] - x.samples[i]) < 1e-12);
  }

  Signal split = apply_gain_db(apply_gain_db(x, 7.0), 6.0);
  Signal joint = apply_gain_db(x, 13.0);
  for (std::size_t i = 0; i < x.samples.size(); i += 199) {
    CHECK(std::abs(split.samples[i] - joint.samples[i]) <=
          1e-9 * std::abs(joint.samples[i]));
  }
}

TEST_CASE("fir_lowpass meets its band spec") {
  const double fs = 20e6;
  const double cutoff = 4e6;
  const double transition = 1e6;

  // DC passes at unity
  Signal dc = single_tone(0.0, fs, 51200.0 / fs, 1.0);
  Signal dc_out = fir_lowpass(dc, cutoff, transition);
  CHECK(std::abs(dc_out.samples[dc_out.samples.size() / 2]) ==
        doctest::Approx(1.0).epsilon(0.01));

  // stopband edge tone down >= 40 dB
  Signal stop = single_tone(cutoff + transition, fs, 51200.0 / fs, 1.0);
  CHECK(tone_attenuation_db(stop, cutoff + transition, cutoff, transition,
                            1024) >= 40.0);

  // mid-passband tone within 1 dB
  Signal pass = single_tone(cutoff / 2, fs, 51200.0 / fs, 1.0);
  CHECK(std::abs(tone_attenuation_db(pass, cutoff / 2, cutoff, transition,
                                     1024)) <= 1.0);

  Signal s = gaussian_noise(1e6, 0.01, 1.0, 3);
  CHECK(error_code_of([&] { fir_lowpass(s, 0.0, 1e5); }) == ErrorCode::BadBand);
  CHECK(error_code_of([&] { fir_lowpass(s, 4e5, 2e5); }) == ErrorCode::BadBand);
}

TEST_CASE("power_spectrum matches the naive DFT") {
  Signal s = gaussian_noise(1e6, 64.0 / 1e6, 1.0, 77);
  REQUIRE(s.samples.size() == 64);
  Spectrum spec = power_spectrum(s, 64);
  std::vector<double> oracle = naive_periodogram(s.samples);
  for (std::size_t i = 0; i < 64; ++i) {
    const std::size_t k = (i + 32) % 64;  // oracle is unshifted
    CHECK(spec.power[i] == doctest::Approx(oracle[k]).epsilon(1e-9));
  }
}

TEST_CASE("power_spectrum properties") {
  // Parseval: bins sum to the mean time-domain power
  Signal s = gaussian_noise(10e6, 8192.0 / 10e6, 1.7, 123);
  Spectrum spec = power_spectrum(s, 1024);
  double sum = 0.0;
  for (double p : spec.power) sum += p;
  CHECK(sum == doctest::Approx(mean_power(s)).epsilon(1e-6));

  // white noise is flat: averaged over 100 windows, max/min < 10
  Signal noise = gaussian_noise(10e6, 102400.0 / 10e6, 1.0, 9);
  Spectrum flat = power_spectrum(noise, 1024);
  double lo = flat.power[0], hi = flat.power[0];
  for (double p : flat.power) {
    lo = std::min(lo, p);
    hi = std::max(hi, p);
  }
  CHECK(hi / lo < 10.0);

  Signal tiny = gaussian_noise(1e6, 100.0 / 1e6, 1.0, 2);
  CHECK(error_code_of([&] { power_spectrum(tiny, 1024); }) ==
        ErrorCode::TooFewSamples);
  CHECK(error_code_of([&] { power_spectrum(tiny, 48); }) == ErrorCode::BadBand);
}

TEST_CASE("entropy of constructed distributions") {
  // uniform over 256 bins of width 1/256: discrete 8 bits, differential 0
  EmpiricalDistribution uniform;
  uniform.bin_edges.resize(257);
  for (std::size_t i = 0; i <= 256; ++i) {
    uniform.bin_edges[i] = static_cast<double>(i) / 256.0;
  }
  uniform.probabilities.assign(256, 1.0 / 256.0);
  CHECK(discrete_entropy(uniform) == doctest::Approx(8.0).epsilon(1e-12));
  CHECK(estimate_entropy(uniform) == doctest::Approx(0.0).epsilon(1e-12));

  EmpiricalDistribution point;
  point.bin_edges = {0.0, 1.0};
  point.probabilities = {1.0};
  CHECK(discrete_entropy(point) == 0.0);
  CHECK(estimate_entropy(point) == 0.0);
}

TEST_CASE("differential entropy of a standard gaussian") {
  // closed form: 0.5*log2(2*pi*e) = 2.0471
  const double expected = 0.5 * std::log2(2.0 * std::numbers::pi * std::numbers::e);
  std::vector<double> samples = gaussian_reals(1000000, 1.0, 31);
  const double estimate = estimate_entropy(histogram(samples, 256));
  CHECK(estimate == doctest::Approx(expected).epsilon(0.025));
  CHECK(std::abs(estimate - 2.047) < 0.05);
}

TEST_CASE("mutual information estimator") {
  // independent sequences carry ~0 bits
  std::vector<double> x = gaussian_reals(200000, 1.0, 41);
  std::vector<double> y = gaussian_reals(200000, 1.0, 42);
  CHECK(estimate_mutual_information(x, y, 64) <= 0.05);

  // identity channel: I equals the discrete entropy of the binned input
  std::vector<double> z = gaussian_reals(50000, 1.0, 43);
  const double h = discrete_entropy(histogram(z, 64));
  CHECK(estimate_mutual_information(z, z, 64) ==
        doctest::Approx(h).epsilon(1e-9));

  CHECK(error_code_of([&] {
          std::vector<double> small(100, 0.0);
          estimate_mutual_information(small, small, 64);
        }) == ErrorCode::TooFewSamples);
  CHECK(error_code_of([&] { estimate_mutual_information(x, z, 64); }) ==
        ErrorCode::LengthMismatch);
}

TEST_CASE("gaussian channel capacity oracle at 0 dB") {
  // y = x + n with equal powers: I = 0.5*log2(1 + 1) = 0.5 bits
  std::vector<double> x = gaussian_reals(1000000, 1.0, 51);
  std::vector<double> n = gaussian_reals(1000000, 1.0, 52);
  std::vector<double> y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] + n[i];
  CHECK(std::abs(estimate_mutual_information(x, y, 64) - 0.5) < 0.05);
}

TEST_CASE("scanned_information") {
  std::vector<double> x = gaussian_reals(50000, 1.0, 61);

  // identity channel scores ~0
  CHECK(scanned_information(x, x, 64) == doctest::Approx(0.0).epsilon(1e-9));

  // independent y: I_s ~ -H(X)
  std::vector<double> y = gaussian_reals(50000, 1.0, 62);
  const double hx = discrete_entropy(histogram(x, 64));
  CHECK(std::abs(scanned_information(x, y, 64) + hx) < 0.05);

  // composition of the two estimators
  std::vector<double> n = gaussian_reals(50000, 1.0, 63);
  std::vector<double> awgn(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) awgn[i] = x[i] + n[i];
  const double direct = scanned_information(x, awgn, 64);
  const double composed = estimate_mutual_information(x, awgn, 64) -
                          discrete_entropy(histogram(x, 64));
  CHECK(direct == doctest::Approx(composed).epsilon(1e-12));
}

TEST_CASE("csv writers") {
  Signal tone = single_tone(1e5, 1e6, 2048.0 / 1e6, 1.0);
  Spectrum spec = power_spectrum(tone, 1024);

  std::ostringstream spectrum_csv;
  write_spectrum_csv(spec, spectrum_csv);
  std::string text = spectrum_csv.str();
  CHECK(text.starts_with("frequency_hz,power\n"));
  CHECK(std::count(text.begin(), text.end(), '\n') == 1025);

  std::ostringstream signal_csv;
  write_signal_csv(tone, signal_csv);
  text = signal_csv.str();
  CHECK(text.starts_with("sample,re,im\n"));
  CHECK(std::count(text.begin(), text.end(), '\n') == 2049);
}
