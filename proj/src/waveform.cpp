#include "otfs/waveform.hpp"

#include <cmath>
#include <stdexcept>

namespace otfs {
namespace {

constexpr int kInterpTaps = 64; // windowed-sinc support, +-32 samples
constexpr double kKaiserBeta = 9.0;

double bessel_i0(double x) {
    // power series; converges fast for the window arguments used here
    double term = 1.0, sum = 1.0;
    const double q = x * x / 4.0;
    for (int k = 1; k < 64; ++k) {
        term *= q / (static_cast<double>(k) * k);
        sum += term;
        if (term < 1e-18 * sum) break;
    }
    return sum;
}

double kaiser(double u, double half_width) {
    const double t = u / half_width;
    if (std::abs(t) >= 1.0) return 0.0;
    static const double norm = bessel_i0(kKaiserBeta);
    return bessel_i0(kKaiserBeta * std::sqrt(1.0 - t * t)) / norm;
}

double sinc(double x) {
    if (std::abs(x) < 1e-12) return 1.0;
    const double px = M_PI * x;
    return std::sin(px) / px;
}

} // namespace

cd interpolate_sample(const std::vector<cd>& samples, double position) {
    const long n = static_cast<long>(samples.size());
    const double r = std::nearbyint(position);
    if (std::abs(position - r) < 1e-9) {
        const long idx = static_cast<long>(r);
        return (idx >= 0 && idx < n) ? samples[idx] : cd(0, 0);
    }
    const long base = static_cast<long>(std::floor(position));
    cd acc = 0;
    for (long j = base - kInterpTaps / 2 + 1; j <= base + kInterpTaps / 2; ++j) {
        if (j < 0 || j >= n) continue;
        const double d = position - static_cast<double>(j);
        acc += samples[j] * (sinc(d) * kaiser(d, kInterpTaps / 2.0));
    }
    return acc;
}

SampledWaveform heisenberg_rect(const TFGrid& X, const OtfsParams& p, int osf) {
    if (osf < 1) throw std::invalid_argument("heisenberg_rect: osf must be at least 1");
    if (!X.matches(p))
        throw std::invalid_argument("heisenberg_rect: grid dimensions do not match params");
    const int M = p.num_subcarriers, N = p.num_slots;
    const long block = static_cast<long>(osf) * M;
    SampledWaveform s;
    s.osf = osf;
    s.rate = osf * M * p.subcarrier_spacing;
    s.t0 = 0;
    s.samples.assign(block * N, cd(0, 0));
    const double amp = 1.0 / std::sqrt(p.slot_duration);
    for (int n = 0; n < N; ++n) {
        for (long q = 0; q < block; ++q) {
            // t - nT in units of 1/(osf M df) is just q
            cd acc = 0;
            for (int m = 0; m < M; ++m) {
                const double phase = 2.0 * M_PI * m * q / static_cast<double>(block);
                acc += X.at(n, m) * cd(std::cos(phase), std::sin(phase));
            }
            s.samples[n * block + q] = amp * acc;
        }
    }
    return s;
}

SampledWaveform apply_ltv_channel_time(const SampledWaveform& s, const ChannelRealization& ch) {
    SampledWaveform r = s;
    std::fill(r.samples.begin(), r.samples.end(), cd(0, 0));
    const long n = static_cast<long>(s.samples.size());
    for (const PathParams& path : ch.paths) {
        const double scale = 1.0 + path.inv_p();
        for (long q = 0; q < n; ++q) {
            const double t = s.time_at(q);
            const double pos = (scale * t - path.tau - s.t0) * s.rate;
            const cd tap = interpolate_sample(s.samples, pos);
            const double phase = 2.0 * M_PI * path.nu * t;
            r.samples[q] += path.beta * cd(std::cos(phase), std::sin(phase)) * tap;
        }
    }
    return r;
}

TFGrid wigner_rect(const SampledWaveform& r, const OtfsParams& p) {
    const int M = p.num_subcarriers, N = p.num_slots;
    const long block = static_cast<long>(r.osf) * M;
    if (static_cast<long>(r.samples.size()) < block * N)
        throw std::invalid_argument("wigner_rect: waveform does not cover the frame");
    // The matched-filter correlation is evaluated at the M critical symbol
    // instants t = nT + qT/M of each slot (the cross-ambiguity convention of
    // the discrete system model); an oversampled r only sharpens the channel
    // application upstream. At osf = 1 this is the plain Riemann sum.
    TFGrid Y(N, M);
    const double amp = std::sqrt(p.slot_duration) / M;
    for (int n = 0; n < N; ++n) {
        for (int m = 0; m < M; ++m) {
            cd acc = 0;
            for (int q = 0; q < M; ++q) {
                // e^{-j2pi m df t_q}: the nT part is an integer multiple of 2pi
                const double phase = -2.0 * M_PI * m * q / static_cast<double>(M);
                acc += r.samples[n * block + static_cast<long>(q) * r.osf] *
                       cd(std::cos(phase), std::sin(phase));
            }
            Y.at(n, m) = amp * acc;
        }
    }
    return Y;
}

} // namespace otfs
