#pragma once

// Raw little-endian waveform container:
//   uint64 M, uint64 N, float64 fs_hz, then M*N float64 samples, row-major
//   (sensor 0 first).

#include <iosfwd>
#include <string>

#include "hsdoa/signal_model.hpp"

namespace hsdoa {

void write_waveforms(std::ostream& out, const SampledWaveforms& w);
void save_waveforms(const std::string& path, const SampledWaveforms& w);

SampledWaveforms read_waveforms(std::istream& in);
SampledWaveforms load_waveforms(const std::string& path);

}  // namespace hsdoa
