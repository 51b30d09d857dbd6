#include "fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>
#include <vector>

#include "hsdoa/errors.hpp"

namespace hsdoa::detail {
namespace {

enum class Kind { kR2C, kC2R, kC2CBackward };

std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}

fftw_plan get_plan(Kind kind, std::size_t n) {
  static std::map<std::tuple<Kind, std::size_t>, fftw_plan> cache;
  std::lock_guard lock(plan_mutex());
  auto key = std::make_tuple(kind, n);
  if (auto it = cache.find(key); it != cache.end()) return it->second;

  const int len = static_cast<int>(n);
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  std::vector<double> real(n);
  std::vector<std::complex<double>> a(n), b(n);
  auto* ca = reinterpret_cast<fftw_complex*>(a.data());
  auto* cb = reinterpret_cast<fftw_complex*>(b.data());
  fftw_plan plan = nullptr;
  switch (kind) {
    case Kind::kR2C: plan = fftw_plan_dft_r2c_1d(len, real.data(), ca, flags); break;
    case Kind::kC2R: plan = fftw_plan_dft_c2r_1d(len, ca, real.data(), flags); break;
    case Kind::kC2CBackward: plan = fftw_plan_dft_1d(len, ca, cb, FFTW_BACKWARD, flags); break;
  }
  if (plan == nullptr) throw NumericError("FFTW planning failed");
  cache.emplace(key, plan);
  return plan;
}

}  // namespace

void rfft(std::span<const double> in, std::span<std::complex<double>> out) {
  const std::size_t n = in.size();
  if (n == 0 || out.size() != n / 2 + 1) throw ParameterError("rfft: bad buffer sizes");
  fftw_plan plan = get_plan(Kind::kR2C, n);
  fftw_execute_dft_r2c(plan, const_cast<double*>(in.data()),
                       reinterpret_cast<fftw_complex*>(out.data()));
}

void irfft(std::span<const std::complex<double>> in, std::span<double> out) {
  const std::size_t n = out.size();
  if (n == 0 || in.size() != n / 2 + 1) throw ParameterError("irfft: bad buffer sizes");
  // c2r destroys its input.
  std::vector<std::complex<double>> scratch(in.begin(), in.end());
  fftw_plan plan = get_plan(Kind::kC2R, n);
  fftw_execute_dft_c2r(plan, reinterpret_cast<fftw_complex*>(scratch.data()), out.data());
}

void ifft(std::span<const std::complex<double>> in, std::span<std::complex<double>> out) {
  const std::size_t n = in.size();
  if (n == 0 || out.size() != n) throw ParameterError("ifft: bad buffer sizes");
  fftw_plan plan = get_plan(Kind::kC2CBackward, n);
  fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in.data())),
                   reinterpret_cast<fftw_complex*>(out.data()));
}

}  // namespace hsdoa::detail
