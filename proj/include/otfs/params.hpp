#pragma once

#include <stdexcept>
#include <string>

namespace otfs {

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s

// Grid geometry and carrier configuration of one OTFS frame.
// Rows of every grid index Doppler (k) or time (n), columns index
// delay (l) or frequency (m).
struct OtfsParams {
    int num_subcarriers = 0;       // M
    int num_slots = 0;             // N
    double subcarrier_spacing = 0; // delta_f, Hz
    double carrier_freq = 0;       // f_c, Hz
    double slot_duration = 0;      // T = 1/delta_f, seconds (derived)
    int max_delay_index = 0;       // l_max
    double max_doppler_index = 0;  // k_max (real-valued cap)

    double tau_max() const { return max_delay_index * slot_duration / num_subcarriers; }
    double nu_max() const { return max_doppler_index * subcarrier_spacing / num_slots; }
    long grid_size() const { return static_cast<long>(num_slots) * num_subcarriers; }

    static OtfsParams make(int M, int N, double delta_f, double f_c,
                           int l_max, double k_max) {
        if (M <= 0 || N <= 0) throw std::invalid_argument("OtfsParams: M and N must be positive");
        if (delta_f <= 0) throw std::invalid_argument("OtfsParams: subcarrier spacing must be positive");
        if (f_c <= 0) throw std::invalid_argument("OtfsParams: carrier frequency must be positive");
        if (static_cast<long>(M) * N >= 1000000L)
            throw std::invalid_argument("OtfsParams: M*N must stay below 1e6");
        if (!(l_max > 1 && l_max <= M - 1))
            throw std::invalid_argument("OtfsParams: need 1 < l_max <= M-1, got l_max=" + std::to_string(l_max));
        if (!(k_max > 1.0 && k_max < N / 2.0))
            throw std::invalid_argument("OtfsParams: need 1 < k_max < N/2, got k_max=" + std::to_string(k_max));
        OtfsParams p;
        p.num_subcarriers = M;
        p.num_slots = N;
        p.subcarrier_spacing = delta_f;
        p.carrier_freq = f_c;
        p.slot_duration = 1.0 / delta_f; // T*delta_f = 1 by construction
        p.max_delay_index = l_max;
        p.max_doppler_index = k_max;
        return p;
    }
};

} // namespace otfs
