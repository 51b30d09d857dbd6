#include "hsdoa/waveform_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "hsdoa/errors.hpp"

namespace hsdoa {
namespace {

static_assert(std::endian::native == std::endian::little, "waveform files assume a little-endian host");

template <class T>
void put(std::ostream& out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.write(buf, sizeof(T));
}

template <class T>
T get(std::istream& in) {
  char buf[sizeof(T)];
  if (!in.read(buf, sizeof(T))) throw ParameterError("truncated waveform header");
  T v;
  std::memcpy(&v, buf, sizeof(T));
  return v;
}

}  // namespace

void write_waveforms(std::ostream& out, const SampledWaveforms& w) {
  put<std::uint64_t>(out, static_cast<std::uint64_t>(w.samples.rows()));
  put<std::uint64_t>(out, static_cast<std::uint64_t>(w.samples.cols()));
  put<double>(out, w.fs_hz);
  out.write(reinterpret_cast<const char*>(w.samples.data()),
            static_cast<std::streamsize>(w.samples.size() * sizeof(double)));
  if (!out) throw ParameterError("failed writing waveform data");
}

void save_waveforms(const std::string& path, const SampledWaveforms& w) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParameterError("cannot open '" + path + "' for writing");
  write_waveforms(out, w);
}

SampledWaveforms read_waveforms(std::istream& in) {
  const auto m = get<std::uint64_t>(in);
  const auto n = get<std::uint64_t>(in);
  SampledWaveforms w;
  w.fs_hz = get<double>(in);
  if (m == 0 || n == 0 || m > (1u << 16) || n > (std::uint64_t{1} << 32))
    throw ParameterError("implausible waveform dimensions");
  if (!(w.fs_hz > 0.0)) throw ParameterError("waveform sample rate must be positive");
  w.samples.resize(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
  if (!in.read(reinterpret_cast<char*>(w.samples.data()),
               static_cast<std::streamsize>(w.samples.size() * sizeof(double))))
    throw ParameterError("truncated waveform samples");
  return w;
}

SampledWaveforms load_waveforms(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParameterError("cannot open '" + path + "'");
  return read_waveforms(in);
}

}  // namespace hsdoa
