#pragma once

#include <vector>

#include "otfs/channel.hpp"
#include "otfs/grid.hpp"
#include "otfs/params.hpp"

namespace otfs {

// Complex baseband waveform sampled at rate = osf * M * delta_f starting
// at t0; a transmit frame holds osf*M*N samples.
struct SampledWaveform {
    std::vector<cd> samples;
    double rate = 0;
    int osf = 1;
    double t0 = 0;

    double time_at(long q) const { return t0 + q / rate; }
};

// Heisenberg transform with the rectangular pulse g_tx = 1/sqrt(T) on [0,T):
// s(t) = sum_{n,m} X[n,m] g_tx(t - nT) e^{j2pi m df (t - nT)}.
SampledWaveform heisenberg_rect(const TFGrid& X, const OtfsParams& p, int osf);

// Physical LTV channel in the time domain:
// r(t) = sum_i beta_i e^{j2pi nu_i t} s((1 + nu_i/f_c) t - tau_i),
// with the time-scaled delayed waveform read through a 64-tap windowed-sinc
// interpolator; positions outside the frame read as zero.
SampledWaveform apply_ltv_channel_time(const SampledWaveform& s, const ChannelRealization& ch);

// Matched-filter sampling (Wigner transform) with g_rx = g_tx, evaluated as
// a Riemann sum at the waveform sample rate:
// Y[n,m] ~= integral g_rx*(t - nT) r(t) e^{-j2pi m df t} dt.
TFGrid wigner_rect(const SampledWaveform& r, const OtfsParams& p);

// Fractional-sample read used by the channel application; exposed for the
// interpolation accuracy checks.
cd interpolate_sample(const std::vector<cd>& samples, double position);

} // namespace otfs
