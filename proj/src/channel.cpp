#include "otfs/channel.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "otfs/rng.hpp"

namespace otfs {

double PathParams::p() const {
    if (!has_doppler)
        throw std::domain_error("PathParams::p: squint ratio undefined for a static path");
    return 1.0 / inv_p_;
}

PathParams PathParams::make(const OtfsParams& params, cd beta, int delay_index,
                            double doppler_index) {
    if (delay_index < 1 || delay_index > params.max_delay_index)
        throw std::invalid_argument("PathParams: delay index out of [1, l_max]");
    if (std::abs(doppler_index) > params.max_doppler_index)
        throw std::invalid_argument("PathParams: Doppler index exceeds k_max");
    PathParams path;
    path.beta = beta;
    path.delay_index = delay_index;
    path.doppler_index = doppler_index;
    path.tau = delay_index * params.slot_duration / params.num_subcarriers;
    path.nu = doppler_index * params.subcarrier_spacing / params.num_slots;
    path.has_doppler = path.nu != 0.0;
    path.inv_p_ = path.nu / params.carrier_freq;
    if (path.has_doppler && std::abs(path.inv_p_) >= 1e-6)
        throw std::invalid_argument("PathParams: |p| = |f_c/nu| must exceed 1e6");
    const double phase = 2.0 * M_PI * path.tau * path.nu;
    path.beta_prime = beta * cd(std::cos(phase), std::sin(phase));
    return path;
}

DopplerBounds doppler_bounds(double speed_mps, const OtfsParams& p) {
    if (speed_mps < 0) throw std::invalid_argument("doppler_bounds: negative speed");
    DopplerBounds b;
    b.nu_max = speed_mps / kSpeedOfLight * p.carrier_freq;
    b.k_max = b.nu_max * p.num_slots * p.slot_duration;
    return b;
}

ChannelRealization draw_channel(const OtfsParams& p, int num_paths, double speed_mps,
                                uint64_t seed, DopplerGrid grid) {
    if (num_paths < 1) throw std::invalid_argument("draw_channel: need at least one path");
    if (num_paths > p.max_delay_index)
        throw std::invalid_argument("draw_channel: more paths than distinct delay indices");
    const DopplerBounds bounds = doppler_bounds(speed_mps, p);
    if (bounds.k_max > p.max_doppler_index)
        throw std::invalid_argument("draw_channel: speed exceeds the configured k_max");

    Rng rng(seed);
    // partial Fisher-Yates gives distinct delays without replacement
    std::vector<int> delays(p.max_delay_index);
    for (int i = 0; i < p.max_delay_index; ++i) delays[i] = i + 1;
    for (int i = 0; i < num_paths; ++i) {
        const int j = i + static_cast<int>(rng.uniform_below(delays.size() - i));
        std::swap(delays[i], delays[j]);
    }

    ChannelRealization ch;
    ch.params = p;
    ch.seed = seed;
    ch.paths.reserve(num_paths);
    const int k_span = static_cast<int>(std::floor(bounds.k_max));
    for (int i = 0; i < num_paths; ++i) {
        const cd beta = rng.cgaussian(1.0 / num_paths);
        double k = 0;
        if (bounds.nu_max > 0) {
            switch (grid) {
                case DopplerGrid::Integer:
                    k = static_cast<double>(static_cast<int>(rng.uniform_below(2 * k_span + 1)) -
                                            k_span);
                    break;
                case DopplerGrid::Continuous:
                    k = (2.0 * rng.uniform() - 1.0) * bounds.k_max;
                    break;
                case DopplerGrid::Cosine:
                    k = bounds.k_max * std::cos(2.0 * M_PI * rng.uniform());
                    break;
            }
        }
        ch.paths.push_back(PathParams::make(p, beta, delays[i], k));
    }
    return ch;
}

cd tf_response(const PathParams& path, double t, double f) {
    // (nu/f_c)(f_c+f)t - f tau = nu t + (nu/f_c) f t - f tau
    const double phase = 2.0 * M_PI * (path.nu * t + path.inv_p() * f * t - f * path.tau);
    return path.beta * cd(std::cos(phase), std::sin(phase));
}

cd dd_response(const PathParams& path, double tau, double nu) {
    if (!path.has_doppler)
        throw std::domain_error("dd_response: nu_i = 0 is the delta branch; check has_doppler");
    const double p_i = path.p();
    const double phase = 2.0 * M_PI * p_i * (tau - path.tau) * (nu - path.nu);
    return path.beta * std::abs(p_i) * cd(std::cos(phase), std::sin(phase));
}

void write_channel(std::ostream& os, const ChannelRealization& ch) {
    os.precision(17);
    os << "seed " << ch.seed << "\n";
    os << "paths " << ch.paths.size() << "\n";
    for (const PathParams& path : ch.paths)
        os << path.beta.real() << " " << path.beta.imag() << " "
           << path.delay_index << " " << path.doppler_index << "\n";
}

ChannelRealization read_channel(std::istream& is, const OtfsParams& params) {
    std::string tag;
    ChannelRealization ch;
    ch.params = params;
    size_t count = 0;
    if (!(is >> tag >> ch.seed) || tag != "seed")
        throw std::runtime_error("read_channel: missing seed line");
    if (!(is >> tag >> count) || tag != "paths")
        throw std::runtime_error("read_channel: missing paths line");
    for (size_t i = 0; i < count; ++i) {
        double re, im, k;
        int l;
        if (!(is >> re >> im >> l >> k))
            throw std::runtime_error("read_channel: truncated path record");
        ch.paths.push_back(PathParams::make(params, cd(re, im), l, k));
    }
    return ch;
}

} // namespace otfs
