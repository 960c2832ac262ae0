#include "crtpsim/phy_signal.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <ostream>

#include "crtpsim/rng.hpp"

namespace crtpsim {

namespace {

constexpr double kPi = std::numbers::pi;

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// Iterative radix-2 Cooley-Tukey, in place. Sizes are powers of two by the
// power_spectrum precondition.
void fft_inplace(std::vector<std::complex<double>>& a) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double angle = -2.0 * kPi / static_cast<double>(len);
    const std::complex<double> wl(std::cos(angle), std::sin(angle));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        std::complex<double> u = a[i + k];
        std::complex<double> v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wl;
      }
    }
  }
}

double total_power(const Signal& s) {
  double acc = 0.0;
  for (const auto& z : s.samples) acc += std::norm(z);
  return acc;
}

}  // namespace

Signal gaussian_noise(double sample_rate, double duration, double amplitude,
                      std::uint64_t seed) {
  if (sample_rate <= 0.0) raise(ErrorCode::BadBand, "sample_rate must be > 0");
  if (duration <= 0.0) raise(ErrorCode::BadBand, "duration must be > 0");
  if (amplitude < 0.0) raise(ErrorCode::BadBand, "amplitude must be >= 0");
  const auto count = static_cast<std::size_t>(std::llround(sample_rate * duration));
  Signal s;
  s.sample_rate = sample_rate;
  s.samples.resize(count);
  RandomStream rng(seed);
  const double sigma = amplitude / std::numbers::sqrt2;
  for (auto& z : s.samples) {
    double re = sigma * rng.normal();
    double im = sigma * rng.normal();
    z = {re, im};
  }
  return s;
}

Signal single_tone(double freq_offset, double sample_rate, double duration,
                   double amplitude) {
  if (sample_rate <= 0.0) raise(ErrorCode::BadBand, "sample_rate must be > 0");
  if (std::abs(freq_offset) >= sample_rate / 2.0) {
    raise(ErrorCode::AliasedFrequency,
          std::to_string(freq_offset) + " Hz at " +
              std::to_string(sample_rate) + " S/s");
  }
  const auto count = static_cast<std::size_t>(std::llround(sample_rate * duration));
  Signal s;
  s.sample_rate = sample_rate;
  s.samples.resize(count);
  const double w = 2.0 * kPi * freq_offset / sample_rate;
  for (std::size_t n = 0; n < count; ++n) {
    const double phase = w * static_cast<double>(n);
    s.samples[n] = amplitude * std::complex<double>(std::cos(phase), std::sin(phase));
  }
  return s;
}

Signal superpose(const Signal& x, const Signal& interferer) {
  if (x.sample_rate != interferer.sample_rate) {
    raise(ErrorCode::RateMismatch,
          std::to_string(x.sample_rate) + " vs " +
              std::to_string(interferer.sample_rate));
  }
  if (x.samples.size() != interferer.samples.size()) {
    raise(ErrorCode::LengthMismatch,
          std::to_string(x.samples.size()) + " vs " +
              std::to_string(interferer.samples.size()));
  }
  Signal y = x;
  for (std::size_t i = 0; i < y.samples.size(); ++i) {
    y.samples[i] += interferer.samples[i];
  }
  return y;
}

double snr_db(const Signal& x, const Signal& j) {
  if (x.samples.size() != j.samples.size()) {
    raise(ErrorCode::LengthMismatch,
          std::to_string(x.samples.size()) + " vs " +
              std::to_string(j.samples.size()));
  }
  const double px = total_power(x);
  const double pj = total_power(j);
  if (pj == 0.0) return std::numeric_limits<double>::infinity();
  if (px == 0.0) return -std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(px / pj);
}

Signal apply_gain_db(const Signal& s, double gain_db) {
  Signal out = s;
  const double g = std::pow(10.0, gain_db / 20.0);
  for (auto& z : out.samples) z *= g;
  return out;
}

std::vector<double> lowpass_taps(double sample_rate, double cutoff_hz,
                                 double transition_hz) {
  if (cutoff_hz <= 0.0 || transition_hz <= 0.0 ||
      cutoff_hz + transition_hz >= sample_rate / 2.0) {
    raise(ErrorCode::BadBand,
          "cutoff " + std::to_string(cutoff_hz) + " + transition " +
              std::to_string(transition_hz) + " must fit below " +
              std::to_string(sample_rate / 2.0));
  }
  // Hamming window: ~53 dB stopband, tap count 3.3/normalized transition.
  const double df = transition_hz / sample_rate;
  std::size_t taps = static_cast<std::size_t>(std::ceil(3.3 / df));
  if (taps % 2 == 0) ++taps;
  if (taps < 5) taps = 5;
  // Ideal cutoff midway through the transition band.
  const double fc = (cutoff_hz + transition_hz / 2.0) / sample_rate;
  const auto m = static_cast<double>(taps - 1);
  std::vector<double> h(taps);
  double sum = 0.0;
  for (std::size_t i = 0; i < taps; ++i) {
    const double t = static_cast<double>(i) - m / 2.0;
    const double x = 2.0 * kPi * fc * t;
    const double sinc = std::abs(x) < 1e-12 ? 1.0 : std::sin(x) / x;
    const double window =
        0.54 - 0.46 * std::cos(2.0 * kPi * static_cast<double>(i) / m);
    h[i] = 2.0 * fc * sinc * window;
    sum += h[i];
  }
  for (auto& v : h) v /= sum;  // unity DC gain
  return h;
}

Signal fir_lowpass(const Signal& s, double cutoff_hz, double transition_hz) {
  const std::vector<double> h = lowpass_taps(s.sample_rate, cutoff_hz, transition_hz);
  const std::size_t half = h.size() / 2;
  Signal out;
  out.sample_rate = s.sample_rate;
  out.samples.assign(s.samples.size(), {0.0, 0.0});
  const auto n = static_cast<std::ptrdiff_t>(s.samples.size());
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    std::complex<double> acc{0.0, 0.0};
    for (std::size_t k = 0; k < h.size(); ++k) {
      // group delay compensated: output aligned with input
      const std::ptrdiff_t j =
          i + static_cast<std::ptrdiff_t>(half) - static_cast<std::ptrdiff_t>(k);
      if (j >= 0 && j < n) acc += h[k] * s.samples[static_cast<std::size_t>(j)];
    }
    out.samples[static_cast<std::size_t>(i)] = acc;
  }
  return out;
}

Spectrum power_spectrum(const Signal& s, std::size_t fft_size) {
  if (!is_power_of_two(fft_size)) {
    raise(ErrorCode::BadBand, "fft_size must be a power of two");
  }
  if (s.samples.size() < fft_size) {
    raise(ErrorCode::TooFewSamples,
          std::to_string(s.samples.size()) + " < " + std::to_string(fft_size));
  }
  const std::size_t windows = s.samples.size() / fft_size;
  std::vector<double> acc(fft_size, 0.0);
  std::vector<std::complex<double>> buf(fft_size);
  for (std::size_t w = 0; w < windows; ++w) {
    std::copy_n(s.samples.begin() + static_cast<std::ptrdiff_t>(w * fft_size),
                fft_size, buf.begin());
    fft_inplace(buf);
    for (std::size_t k = 0; k < fft_size; ++k) {
      acc[k] += std::norm(buf[k]);
    }
  }
  // |X_k|^2 / N^2 averaged over windows; Parseval makes the bins sum to the
  // mean time-domain power of the consumed samples.
  const double scale =
      1.0 / (static_cast<double>(windows) *
             static_cast<double>(fft_size) * static_cast<double>(fft_size));
  Spectrum spec;
  spec.bin_frequencies.resize(fft_size);
  spec.power.resize(fft_size);
  const double df = s.sample_rate / static_cast<double>(fft_size);
  const std::size_t halfn = fft_size / 2;
  for (std::size_t i = 0; i < fft_size; ++i) {
    // fftshift order: -fs/2 .. fs/2 - df
    const std::size_t k = (i + halfn) % fft_size;
    spec.bin_frequencies[i] =
        (static_cast<double>(i) - static_cast<double>(halfn)) * df;
    spec.power[i] = acc[k] * scale;
  }
  return spec;
}

double mean_power(const Signal& s) {
  if (s.samples.empty()) return 0.0;
  return total_power(s) / static_cast<double>(s.samples.size());
}

EmpiricalDistribution histogram(std::span<const double> samples,
                                std::size_t bins) {
  if (samples.empty() || bins == 0) {
    raise(ErrorCode::TooFewSamples, "empty sample set");
  }
  const auto [lo_it, hi_it] = std::minmax_element(samples.begin(), samples.end());
  double lo = *lo_it;
  double hi = *hi_it;
  if (lo == hi) hi = lo + 1.0;  // degenerate: single point mass
  EmpiricalDistribution d;
  d.bin_edges.resize(bins + 1);
  d.probabilities.assign(bins, 0.0);
  const double width = (hi - lo) / static_cast<double>(bins);
  for (std::size_t i = 0; i <= bins; ++i) {
    d.bin_edges[i] = lo + width * static_cast<double>(i);
  }
  const double inv = 1.0 / static_cast<double>(samples.size());
  for (double v : samples) {
    auto idx = static_cast<std::size_t>((v - lo) / width);
    if (idx >= bins) idx = bins - 1;  // right edge closes the last bin
    d.probabilities[idx] += inv;
  }
  return d;
}

double discrete_entropy(const EmpiricalDistribution& d) {
  double h = 0.0;
  for (double p : d.probabilities) {
    if (p > 0.0) h -= p * std::log2(p);
  }
  return h;
}

double estimate_entropy(const EmpiricalDistribution& d) {
  double h = 0.0;
  for (std::size_t i = 0; i < d.probabilities.size(); ++i) {
    const double p = d.probabilities[i];
    if (p > 0.0) {
      const double width = d.bin_edges[i + 1] - d.bin_edges[i];
      h += p * (std::log2(width) - std::log2(p));
    }
  }
  return h;
}

namespace {

struct JointHistogram {
  std::vector<double> joint;  // bins x bins, row-major over x
  std::vector<double> px;
  std::vector<double> py;
};

JointHistogram joint_histogram(std::span<const double> x,
                               std::span<const double> y, std::size_t bins) {
  const auto [xlo_it, xhi_it] = std::minmax_element(x.begin(), x.end());
  const auto [ylo_it, yhi_it] = std::minmax_element(y.begin(), y.end());
  double xlo = *xlo_it, xhi = *xhi_it, ylo = *ylo_it, yhi = *yhi_it;
  if (xlo == xhi) xhi = xlo + 1.0;
  if (ylo == yhi) yhi = ylo + 1.0;
  const double wx = (xhi - xlo) / static_cast<double>(bins);
  const double wy = (yhi - ylo) / static_cast<double>(bins);
  JointHistogram h;
  h.joint.assign(bins * bins, 0.0);
  h.px.assign(bins, 0.0);
  h.py.assign(bins, 0.0);
  const double inv = 1.0 / static_cast<double>(x.size());
  for (std::size_t n = 0; n < x.size(); ++n) {
    auto i = static_cast<std::size_t>((x[n] - xlo) / wx);
    auto j = static_cast<std::size_t>((y[n] - ylo) / wy);
    if (i >= bins) i = bins - 1;
    if (j >= bins) j = bins - 1;
    h.joint[i * bins + j] += inv;
  }
  for (std::size_t i = 0; i < bins; ++i) {
    for (std::size_t j = 0; j < bins; ++j) {
      h.px[i] += h.joint[i * bins + j];
      h.py[j] += h.joint[i * bins + j];
    }
  }
  return h;
}

void check_mi_inputs(std::span<const double> x, std::span<const double> y,
                     std::size_t bins) {
  if (x.size() != y.size()) {
    raise(ErrorCode::LengthMismatch,
          std::to_string(x.size()) + " vs " + std::to_string(y.size()));
  }
  if (bins == 0 || x.size() < 10 * bins * bins) {
    raise(ErrorCode::TooFewSamples,
          "need >= 10*bins^2 = " + std::to_string(10 * bins * bins) +
              " samples, got " + std::to_string(x.size()));
  }
}

}  // namespace

double estimate_mutual_information(std::span<const double> x,
                                   std::span<const double> y,
                                   std::size_t bins) {
  check_mi_inputs(x, y, bins);
  const JointHistogram h = joint_histogram(x, y, bins);
  double mi = 0.0;
  for (std::size_t i = 0; i < bins; ++i) {
    for (std::size_t j = 0; j < bins; ++j) {
      const double pxy = h.joint[i * bins + j];
      if (pxy > 0.0) {
        mi += pxy * std::log2(pxy / (h.px[i] * h.py[j]));
      }
    }
  }
  return std::max(mi, 0.0);
}

double scanned_information(std::span<const double> x,
                           std::span<const double> y, std::size_t bins) {
  check_mi_inputs(x, y, bins);
  const double mi = estimate_mutual_information(x, y, bins);
  const double hx = discrete_entropy(histogram(x, bins));
  return mi - hx;
}

void write_spectrum_csv(const Spectrum& s, std::ostream& out) {
  out << "frequency_hz,power\n";
  char line[80];
  for (std::size_t i = 0; i < s.power.size(); ++i) {
    std::snprintf(line, sizeof line, "%.9g,%.9g\n", s.bin_frequencies[i],
                  s.power[i]);
    out << line;
  }
}

void write_signal_csv(const Signal& s, std::ostream& out) {
  out << "sample,re,im\n";
  char line[96];
  for (std::size_t i = 0; i < s.samples.size(); ++i) {
    std::snprintf(line, sizeof line, "%zu,%.9g,%.9g\n", i, s.samples[i].real(),
                  s.samples[i].imag());
    out << line;
  }
}

}  // namespace crtpsim
