#include "hsdoa/ptft.hpp"

#include <cmath>
#include <sstream>

#include "fft.hpp"
#include "hsdoa/errors.hpp"

namespace hsdoa {

void PtftConfig::validate() const {
  if (!(sigma_hz > 0.0)) throw ParameterError("PTFT window width sigma must be positive");
  if (!(f_step_hz > 0.0)) throw ParameterError("PTFT f_step must be positive");
  if (!(delta_f_hz > 0.0)) throw ParameterError("frequency difference delta_f must be positive");
}

int window_count(const LfmPulse& pulse, const PtftConfig& cfg) {
  cfg.validate();
  const double span = (pulse.bandwidth() - cfg.delta_f_hz) / cfg.f_step_hz;
  const int w = static_cast<int>(std::floor(span + 1e-9));
  if (w < 1) throw ParameterError("band too narrow for delta_f: no frequency pairs");
  return w;
}

double window_center(const LfmPulse& pulse, const PtftConfig& cfg, int w) {
  return pulse.f_low_hz + static_cast<double>(w - 1) * cfg.f_step_hz;
}

KernelPhase kernel_phase(const LfmPulse& pulse, double kernel_const_s, double f_hz) {
  const double b = pulse.bandwidth();
  const double t = pulse.duration_s;
  const double offset = f_hz - pulse.f_low_hz;
  KernelPhase k;
  k.kappa_s = -t * offset / b + kernel_const_s;
  // -2 pi * antiderivative of kappa, antiderivative = -T (f - fL)^2 / (2B) + C f.
  k.rotation_rad = kTwoPi * (t * offset * offset / (2.0 * b) - kernel_const_s * f_hz);
  return k;
}

BinRange window_bins(double center_hz, double sigma_hz, double df_hz, Eigen::Index bin_count) {
  constexpr double kEps = 1e-9;
  BinRange r;
  r.first = static_cast<Eigen::Index>(std::ceil((center_hz - 0.5 * sigma_hz) / df_hz - kEps));
  r.last = static_cast<Eigen::Index>(std::ceil((center_hz + 0.5 * sigma_hz) / df_hz - kEps));
  if (r.first < 0 || r.last > bin_count || r.size() < 1) {
    std::ostringstream os;
    os << "PTFT window at " << center_hz << " Hz (sigma " << sigma_hz
       << " Hz) does not fit the spectrum";
    throw ParameterError(os.str());
  }
  return r;
}

namespace {

// Y[k] Gamma_R(f_k) Gamma_S(f_k) scaled by 2/N over the window bins.
std::vector<cplx> rotated_window(const SpectrumMatrix& spec, int sensor, const LfmPulse& pulse,
                                 const PtftConfig& cfg, double center_hz, BinRange& range) {
  if (sensor < 0 || sensor >= spec.sensors()) throw ParameterError("sensor index out of range");
  range = window_bins(center_hz, cfg.sigma_hz, spec.df_hz, spec.bin_count());
  const double scale = 2.0 / static_cast<double>(spec.record_length);
  const double kappa_center = kernel_phase(pulse, cfg.kernel_const_s, center_hz).kappa_s;
  std::vector<cplx> out(static_cast<std::size_t>(range.size()));
  for (Eigen::Index k = range.first; k < range.last; ++k) {
    const double f = static_cast<double>(k) * spec.df_hz;
    double phase = kernel_phase(pulse, cfg.kernel_const_s, f).rotation_rad;
    if (!cfg.gamma_s_unity) phase += kTwoPi * f * kappa_center;
    out[static_cast<std::size_t>(k - range.first)] =
        scale * spec.bins(sensor, k) * std::polar(1.0, phase);
  }
  return out;
}

}  // namespace

CVector ptft_transform(const SpectrumMatrix& spec, int sensor, const LfmPulse& pulse,
                       const PtftConfig& cfg, double center_hz) {
  cfg.validate();
  BinRange range;
  const auto win = rotated_window(spec, sensor, pulse, cfg, center_hz, range);
  const std::size_t n = spec.record_length;
  std::vector<cplx> full(n, cplx{});
  for (Eigen::Index k = range.first; k < range.last; ++k)
    full[static_cast<std::size_t>(k)] = win[static_cast<std::size_t>(k - range.first)];
  CVector g(static_cast<Eigen::Index>(n));
  detail::ifft(full, std::span<cplx>(g.data(), n));
  return g;
}

CVector ptft_transform(std::span<const double> record, const LfmPulse& pulse, const PtftConfig& cfg,
                       int w) {
  const int count = window_count(pulse, cfg);
  if (w < 1 || w > count) throw ParameterError("PTFT window index out of range");
  SampledWaveforms wave;
  wave.fs_hz = pulse.fs_hz;
  wave.samples = Eigen::Map<const Eigen::RowVectorXd>(record.data(),
                                                      static_cast<Eigen::Index>(record.size()));
  return ptft_transform(spectra(wave), 0, pulse, cfg, window_center(pulse, cfg, w));
}

cplx ptft_sample(const SpectrumMatrix& spec, int sensor, const LfmPulse& pulse, const PtftConfig& cfg,
                 double center_hz, Eigen::Index n) {
  BinRange range;
  const auto win = rotated_window(spec, sensor, pulse, cfg, center_hz, range);
  cplx acc{};
  for (Eigen::Index k = range.first; k < range.last; ++k) {
    // k * n can be large; reduce modulo N before forming the angle.
    const auto kn = (k * n) % static_cast<Eigen::Index>(spec.record_length);
    const double ang =
        kTwoPi * static_cast<double>(kn) / static_cast<double>(spec.record_length);
    acc += win[static_cast<std::size_t>(k - range.first)] * std::polar(1.0, ang);
  }
  return acc;
}

TfMap ptft_map(const SpectrumMatrix& spec, int sensor, const LfmPulse& pulse, const PtftConfig& cfg) {
  const int count = window_count(pulse, cfg);
  TfMap map;
  map.dt_s = 1.0 / (spec.df_hz * static_cast<double>(spec.record_length));
  map.values.resize(static_cast<Eigen::Index>(spec.record_length), count);
  for (int w = 1; w <= count; ++w) {
    const double fc = window_center(pulse, cfg, w);
    map.centers_hz.push_back(fc);
    map.values.col(w - 1) = ptft_transform(spec, sensor, pulse, cfg, fc);
  }
  return map;
}

namespace {

RidgeTime argmax_energy(const RVector& energy, double dt) {
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < energy.size(); ++i)
    if (energy[i] > energy[best]) best = i;
  return {best, static_cast<double>(best) * dt};
}

}  // namespace

RidgeTime ridge_time(const TfMap& map) {
  if (map.values.cols() < 1) throw ParameterError("ridge search needs at least one window");
  const RVector energy = map.values.cwiseAbs2().rowwise().sum();
  return argmax_energy(energy, map.dt_s);
}

RidgeTime ridge_time(const SpectrumMatrix& spec, int sensor, const LfmPulse& pulse,
                     const PtftConfig& cfg) {
  const int count = window_count(pulse, cfg);
  const auto n = static_cast<Eigen::Index>(spec.record_length);
  RVector energy = RVector::Zero(n);
  for (int w = 1; w <= count; ++w)
    energy += ptft_transform(spec, sensor, pulse, cfg, window_center(pulse, cfg, w)).cwiseAbs2();
  return argmax_energy(energy, 1.0 / (spec.df_hz * static_cast<double>(n)));
}

TfSnapshotSet extract_snapshots(const SpectrumMatrix& spec, const LfmPulse& pulse,
                                const PtftConfig& cfg) {
  const int count = window_count(pulse, cfg);
  TfSnapshotSet set;
  set.delta_f_hz = cfg.delta_f_hz;
  set.ridge = ridge_time(spec, 0, pulse, cfg);
  const int m_count = spec.sensors();
  set.snapshots.resize(m_count, count);
  set.shifted.resize(m_count, count);
  for (int w = 1; w <= count; ++w) {
    const double fc = window_center(pulse, cfg, w);
    set.centers_hz.push_back(fc);
    for (int m = 0; m < m_count; ++m) {
      set.snapshots(m, w - 1) = ptft_sample(spec, m, pulse, cfg, fc, set.ridge.index);
      set.shifted(m, w - 1) = ptft_sample(spec, m, pulse, cfg, fc + cfg.delta_f_hz, set.ridge.index);
    }
  }
  return set;
}

namespace {

double sinc(double x) { return x == 0.0 ? 1.0 : std::sin(x) / x; }

}  // namespace

RidgeAmplitudeModel ridge_amplitude(const ArrayGeometry& geom, const LfmPulse& pulse,
                                    const PtftConfig& cfg, int m, double theta_deg,
                                    double amplitude) {
  RidgeAmplitudeModel r;
  const double peak = amplitude * cfg.sigma_hz * std::sqrt(pulse.duration_s / pulse.bandwidth());
  const double tau_m = geom.delay(m, theta_deg);
  r.epsilon_s = -tau_m;
  r.rho = peak * std::abs(sinc(kPi * cfg.sigma_hz * r.epsilon_s));
  const double x = kPi * cfg.sigma_hz * tau_m;
  r.relative_deviation = x * x / 6.0;
  r.delta = peak * r.relative_deviation;
  return r;
}

std::optional<std::string> screen_amplitude_error(const ArrayGeometry& geom, const LfmPulse& pulse,
                                                  const PtftConfig& cfg, double tolerance,
                                                  double theta_limit_deg) {
  const auto worst = ridge_amplitude(geom, pulse, cfg, geom.sensors - 1, theta_limit_deg, 1.0);
  if (worst.relative_deviation <= tolerance) return std::nullopt;
  std::ostringstream os;
  os << "PTFT sigma = " << cfg.sigma_hz << " Hz gives a ridge amplitude deviation of "
     << worst.relative_deviation << " at |theta| = " << theta_limit_deg
     << " deg on the last sensor (tolerance " << tolerance << ")";
  return os.str();
}

std::vector<SnrPair> output_snr_gain(const Scene& scene, const PtftConfig& cfg, int trials) {
  if (trials < 1) throw ParameterError("output_snr_gain needs at least one trial");
  if (!(scene.noise_power > 0.0))
    throw NumericError("output SNR undefined: scene has zero noise power");
  const int count = window_count(scene.pulse, cfg);
  const int m_count = scene.geometry.sensors;

  const auto sig = spectra(synthesize_signal(scene));
  const RidgeTime ridge = ridge_time(sig, 0, scene.pulse, cfg);

  std::vector<Eigen::Index> fft_bins;
  for (int w = 1; w <= count; ++w)
    fft_bins.push_back(std::llround(window_center(scene.pulse, cfg, w) / sig.df_hz));

  std::vector<double> sig_fft(m_count, 0.0), sig_ptft(m_count, 0.0);
  std::vector<double> noise_fft(m_count, 0.0), noise_ptft(m_count, 0.0);
  for (int m = 0; m < m_count; ++m) {
    for (int w = 1; w <= count; ++w) {
      sig_fft[m] += std::norm(sig.bins(m, fft_bins[w - 1]));
      sig_ptft[m] += std::norm(
          ptft_sample(sig, m, scene.pulse, cfg, window_center(scene.pulse, cfg, w), ridge.index));
    }
  }
  for (int trial = 0; trial < trials; ++trial) {
    const auto noise = spectra(synthesize_noise(scene, static_cast<std::uint64_t>(trial)));
    for (int m = 0; m < m_count; ++m) {
      for (int w = 1; w <= count; ++w) {
        noise_fft[m] += std::norm(noise.bins(m, fft_bins[w - 1]));
        noise_ptft[m] += std::norm(ptft_sample(noise, m, scene.pulse, cfg,
                                               window_center(scene.pulse, cfg, w), ridge.index));
      }
    }
  }
  std::vector<SnrPair> out(m_count);
  const double nt = static_cast<double>(trials);
  for (int m = 0; m < m_count; ++m) {
    out[m].fft_db = 10.0 * std::log10(sig_fft[m] * nt / noise_fft[m]);
    out[m].ptft_db = 10.0 * std::log10(sig_ptft[m] * nt / noise_ptft[m]);
  }
  return out;
}

}  // namespace hsdoa
