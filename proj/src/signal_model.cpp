#include "hsdoa/signal_model.hpp"

#include <cmath>
#include <random>
#include <string>

#include "fft.hpp"
#include "hsdoa/errors.hpp"
#include "rng.hpp"

namespace hsdoa {

void ArrayGeometry::validate() const {
  if (sensors < 2) throw ParameterError("array needs at least 2 sensors");
  if (!(spacing_m > 0.0)) throw ParameterError("sensor spacing must be positive");
  if (!(speed_mps > 0.0)) throw ParameterError("propagation speed must be positive");
}

double ArrayGeometry::delay(int m, double theta_deg) const {
  return static_cast<double>(m) * spacing_m * std::sin(deg2rad(theta_deg)) / speed_mps;
}

void LfmPulse::validate() const {
  if (!(f_low_hz > 0.0) || !(f_high_hz > f_low_hz))
    throw ParameterError("pulse needs 0 < f_low < f_high");
  if (!(duration_s > 0.0) || duration_s > record_s * (1.0 + 1e-12))
    throw ParameterError("pulse needs 0 < T <= Tall");
  if (!(fs_hz > 2.0 * f_high_hz)) throw ParameterError("sampling rate must exceed 2 * f_high");
}

std::size_t LfmPulse::sample_count() const {
  return static_cast<std::size_t>(std::llround(record_s * fs_hz));
}

void Scene::validate() const {
  geometry.validate();
  pulse.validate();
  if (targets.empty()) throw ParameterError("scene needs at least one target");
  for (const auto& t : targets) {
    if (!(std::abs(t.theta_deg) <= 90.0)) throw ParameterError("target angle outside [-90, 90]");
    if (t.delay_s < 0.0 || t.delay_s + pulse.duration_s > pulse.record_s * (1.0 + 1e-12))
      throw ParameterError("target delay " + std::to_string(t.delay_s) +
                           " s pushes the pulse outside the record");
  }
  if (!(noise_power >= 0.0) || !std::isfinite(noise_power))
    throw ParameterError("noise power must be finite and non-negative");
}

std::vector<double> lfm_waveform(const LfmPulse& pulse) {
  pulse.validate();
  const std::size_t n = pulse.sample_count();
  const double rate = pulse.bandwidth() / (2.0 * pulse.duration_s);
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / pulse.fs_hz;
    if (t >= pulse.duration_s) break;
    // Reduce the cycle count before the trig call to keep the phase accurate.
    const double cycles = pulse.f_low_hz * t + rate * t * t;
    out[i] = std::cos(kTwoPi * (cycles - std::floor(cycles)));
  }
  return out;
}

namespace {

SampledWaveforms allocate(const Scene& scene) {
  SampledWaveforms w;
  w.fs_hz = scene.pulse.fs_hz;
  w.samples = RMatrix::Zero(scene.geometry.sensors,
                            static_cast<Eigen::Index>(scene.pulse.sample_count()));
  return w;
}

void add_signal(const Scene& scene, SampledWaveforms& w) {
  const std::size_t n = w.length();
  const std::size_t nf = n / 2 + 1;
  const auto pulse = lfm_waveform(scene.pulse);
  std::vector<cplx> pulse_spec(nf);
  detail::rfft(pulse, pulse_spec);

  const double df = scene.pulse.bin_spacing();
  std::vector<cplx> row(nf);
  std::vector<double> out(n);
  for (int m = 0; m < scene.geometry.sensors; ++m) {
    std::fill(row.begin(), row.end(), cplx{});
    for (const auto& t : scene.targets) {
      const double tau = t.delay_s + scene.geometry.delay(m, t.theta_deg);
      for (std::size_t k = 0; k < nf; ++k) {
        // Phase in cycles, wrapped before the exponential.
        const double cyc = static_cast<double>(k) * df * tau;
        const double frac = cyc - std::floor(cyc);
        row[k] += t.amplitude * pulse_spec[k] * std::polar(1.0, -kTwoPi * frac);
      }
    }
    detail::irfft(row, out);
    const double scale = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) w.samples(m, static_cast<Eigen::Index>(i)) += out[i] * scale;
  }
}

void add_noise(const Scene& scene, std::uint64_t trial, SampledWaveforms& w) {
  if (scene.noise_power == 0.0) return;
  auto eng = detail::trial_engine(scene.seed, trial);
  std::normal_distribution<double> gauss(0.0, std::sqrt(scene.noise_power));
  for (Eigen::Index m = 0; m < w.samples.rows(); ++m)
    for (Eigen::Index i = 0; i < w.samples.cols(); ++i) w.samples(m, i) += gauss(eng);
}

}  // namespace

SampledWaveforms synthesize_signal(const Scene& scene) {
  scene.validate();
  auto w = allocate(scene);
  add_signal(scene, w);
  return w;
}

SampledWaveforms synthesize_noise(const Scene& scene, std::uint64_t trial) {
  scene.geometry.validate();
  scene.pulse.validate();
  auto w = allocate(scene);
  add_noise(scene, trial, w);
  return w;
}

SampledWaveforms synthesize_received(const Scene& scene, std::uint64_t trial) {
  scene.validate();
  auto w = allocate(scene);
  add_signal(scene, w);
  add_noise(scene, trial, w);
  return w;
}

double noise_power_for_snr(double snr_db, double amplitude) {
  if (!(amplitude > 0.0)) throw ParameterError("signal amplitude must be positive");
  return amplitude * amplitude * std::pow(10.0, -snr_db / 10.0);
}

SpectrumMatrix spectra(const SampledWaveforms& w) {
  SpectrumMatrix s;
  const std::size_t n = w.length();
  const std::size_t nf = n / 2 + 1;
  s.record_length = n;
  s.df_hz = w.fs_hz / static_cast<double>(n);
  s.bins.resize(w.sensors(), static_cast<Eigen::Index>(nf));
  std::vector<double> row(n);
  std::vector<cplx> out(nf);
  for (int m = 0; m < w.sensors(); ++m) {
    for (std::size_t i = 0; i < n; ++i) row[i] = w.samples(m, static_cast<Eigen::Index>(i));
    detail::rfft(row, out);
    for (std::size_t k = 0; k < nf; ++k) s.bins(m, static_cast<Eigen::Index>(k)) = out[k];
  }
  return s;
}

cplx analytic_lfm_spectrum(const LfmPulse& pulse, double f_hz) {
  const double b = pulse.bandwidth();
  if (std::abs(f_hz - pulse.center()) > 0.5 * b) return {};
  const double offset = f_hz - pulse.f_low_hz;
  const cplx gamma = std::sqrt(pulse.duration_s / b) * std::polar(1.0, kPi / 4.0);
  return gamma * std::polar(1.0, -kPi * pulse.duration_s * offset * offset / b);
}

}  // namespace hsdoa
