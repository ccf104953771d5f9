#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "otfs/grid.hpp"
#include "otfs/params.hpp"

namespace otfs {

// One propagation path. beta folds in the carrier phase e^{-j2pi f_c tau};
// the squint ratio p = f_c/nu is undefined for a static path, so all
// squint corrections are carried by inv_p = nu/f_c which is simply 0 then.
struct PathParams {
    cd beta;                  // complex gain beta_i
    double tau = 0;           // delay, seconds (= l * T/M)
    double nu = 0;            // Doppler shift at carrier, Hz (= k * df/N)
    int delay_index = 0;      // l_i, integer >= 1
    double doppler_index = 0; // k_i (real-valued in continuous-Doppler mode)
    cd beta_prime;            // beta * e^{j2pi tau nu}
    bool has_doppler = false; // false marks the nu=0 delta branch

    double p() const;     // f_c/nu; throws on the delta branch
    double inv_p() const { return inv_p_; }

    static PathParams make(const OtfsParams& params, cd beta, int delay_index,
                           double doppler_index);

  private:
    double inv_p_ = 0; // nu/f_c
};

struct ChannelRealization {
    std::vector<PathParams> paths;
    OtfsParams params;
    uint64_t seed = 0;
};

enum class DopplerGrid { Integer, Continuous, Cosine };

struct DopplerBounds {
    double nu_max = 0; // Hz
    double k_max = 0;  // nu_max * N * T (real-valued)
};

// nu_max = (v/c) f_c and its grid-index equivalent.
DopplerBounds doppler_bounds(double speed_mps, const OtfsParams& p);

// Draws num_paths path gains beta_i ~ CN(0, 1/N_P), distinct delay indices
// uniform on {1..l_max}, and Doppler indices uniform on the integer grid
// {-floor(k_v)..floor(k_v)}, with k_v derived from the speed. Continuous
// mode draws uniform real in +-nu_max; Cosine draws nu_max cos(theta) with
// theta uniform (isotropic scattering projection). Deterministic per seed.
ChannelRealization draw_channel(const OtfsParams& p, int num_paths, double speed_mps,
                                uint64_t seed, DopplerGrid grid = DopplerGrid::Integer);

// Time-varying frequency response of one path:
// beta e^{j2pi (nu/f_c)(f_c+f) t} e^{-j2pi f tau}.
cd tf_response(const PathParams& path, double t, double f);

// Dense branch of the single-path delay-Doppler response,
// beta |f_c/nu| e^{j2pi (f_c/nu)(tau-tau_i)(nu-nu_i)}; the nu_i=0 branch is
// a distribution and is signalled by has_doppler, not a value.
cd dd_response(const PathParams& path, double tau, double nu);

// Text round trip for experiment reproducibility.
void write_channel(std::ostream& os, const ChannelRealization& ch);
ChannelRealization read_channel(std::istream& is, const OtfsParams& params);

} // namespace otfs
