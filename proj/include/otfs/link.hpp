#pragma once

#include <cstdint>
#include <vector>

#include "otfs/grid.hpp"
#include "otfs/params.hpp"

namespace otfs {

// Per-sample complex noise variance, anchored either to the pilot SNR
// |x_p|^2/sigma^2 or to E_b/N_0 = sigma_s^2/(sigma^2 log2 Q).
struct NoiseSpec {
    double sigma2 = 0;

    static NoiseSpec from_snr_p(double snr_p_db, double pilot_power);
    static NoiseSpec from_ebn0(double ebn0_db, int bits_per_symbol, double sigma_s2 = 1.0);
};

// Adds i.i.d. CN(0, sigma^2) samples, deterministic per seed.
TFGrid add_noise(const TFGrid& Y, const NoiseSpec& ns, uint64_t seed);

// Per-bin LMMSE: X_hat = H* Y / (|H|^2 + sigma^2/sigma_s^2).
TFGrid lmmse_equalize(const TFGrid& Y, const TFGrid& H, const NoiseSpec& ns, double sigma_s2);

// Hamming distance over length.
double ber(const std::vector<uint8_t>& bits_hat, const std::vector<uint8_t>& bits_ref);

} // namespace otfs
