#include "otfs/link.hpp"

#include <cmath>
#include <stdexcept>

#include "otfs/rng.hpp"

namespace otfs {

NoiseSpec NoiseSpec::from_snr_p(double snr_p_db, double pilot_power) {
    if (pilot_power <= 0) throw std::invalid_argument("NoiseSpec: pilot power must be positive");
    return {pilot_power / std::pow(10.0, snr_p_db / 10.0)};
}

NoiseSpec NoiseSpec::from_ebn0(double ebn0_db, int bits_per_symbol, double sigma_s2) {
    if (bits_per_symbol <= 0) throw std::invalid_argument("NoiseSpec: bits per symbol must be positive");
    return {sigma_s2 / (bits_per_symbol * std::pow(10.0, ebn0_db / 10.0))};
}

TFGrid add_noise(const TFGrid& Y, const NoiseSpec& ns, uint64_t seed) {
    if (ns.sigma2 <= 0) throw std::invalid_argument("add_noise: sigma2 must be positive");
    TFGrid out = Y;
    Rng rng(seed);
    for (cd& z : out.v) z += rng.cgaussian(ns.sigma2);
    return out;
}

TFGrid lmmse_equalize(const TFGrid& Y, const TFGrid& H, const NoiseSpec& ns, double sigma_s2) {
    if (Y.n_rows != H.n_rows || Y.n_cols != H.n_cols)
        throw std::invalid_argument("lmmse_equalize: grid dimensions disagree");
    const double reg = ns.sigma2 / sigma_s2;
    TFGrid X(Y.n_rows, Y.n_cols);
    for (size_t i = 0; i < Y.size(); ++i)
        X.v[i] = std::conj(H.v[i]) * Y.v[i] / (std::norm(H.v[i]) + reg);
    return X;
}

double ber(const std::vector<uint8_t>& bits_hat, const std::vector<uint8_t>& bits_ref) {
    if (bits_hat.size() != bits_ref.size())
        throw std::invalid_argument("ber: bit sequences must have equal length");
    if (bits_ref.empty()) throw std::invalid_argument("ber: empty bit sequences");
    size_t errors = 0;
    for (size_t i = 0; i < bits_ref.size(); ++i)
        if ((bits_hat[i] & 1) != (bits_ref[i] & 1)) ++errors;
    return static_cast<double>(errors) / static_cast<double>(bits_ref.size());
}

} // namespace otfs
