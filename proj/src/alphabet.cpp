#include "otfs/alphabet.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace otfs {
namespace {

// Per-axis Gray code for the 4-levelQAM axis: 00 01 11 10 -> -3 -1 +1 +3.
constexpr double kAxis16[4] = {-3.0, -1.0, 1.0, 3.0};
constexpr int kGray4[4] = {0, 1, 3, 2};

ModAlphabet build_qpsk() {
    ModAlphabet a;
    a.name = "QPSK";
    a.bits_per_symbol = 2;
    a.points.resize(4);
    const double s = 1.0 / std::sqrt(2.0);
    for (int label = 0; label < 4; ++label) {
        const int b0 = (label >> 1) & 1, b1 = label & 1;
        a.points[label] = cd((1 - 2 * b0) * s, (1 - 2 * b1) * s);
    }
    return a;
}

ModAlphabet build_qam16() {
    ModAlphabet a;
    a.name = "16QAM";
    a.bits_per_symbol = 4;
    a.points.resize(16);
    const double s = 1.0 / std::sqrt(10.0);
    for (int label = 0; label < 16; ++label) {
        const int hi = (label >> 2) & 3, lo = label & 3;
        int i_idx = 0, q_idx = 0;
        for (int g = 0; g < 4; ++g) {
            if (kGray4[g] == hi) i_idx = g;
            if (kGray4[g] == lo) q_idx = g;
        }
        a.points[label] = cd(kAxis16[i_idx] * s, kAxis16[q_idx] * s);
    }
    return a;
}

} // namespace

const ModAlphabet& ModAlphabet::qpsk() {
    static const ModAlphabet a = build_qpsk();
    return a;
}

const ModAlphabet& ModAlphabet::qam16() {
    static const ModAlphabet a = build_qam16();
    return a;
}

const ModAlphabet& ModAlphabet::from_name(const std::string& name) {
    if (name == "QPSK" || name == "qpsk") return qpsk();
    if (name == "16QAM" || name == "16qam" || name == "QAM16") return qam16();
    throw std::invalid_argument("unknown modulation alphabet: " + name);
}

DDGrid map_bits(const std::vector<uint8_t>& bits, const ModAlphabet& a, const OtfsParams& p) {
    const size_t expected = static_cast<size_t>(p.grid_size()) * a.bits_per_symbol;
    if (bits.size() != expected)
        throw std::length_error("map_bits: expected " + std::to_string(expected) +
                                " bits, got " + std::to_string(bits.size()));
    DDGrid x(p.num_slots, p.num_subcarriers);
    size_t pos = 0;
    for (size_t s = 0; s < x.size(); ++s) {
        int label = 0;
        for (int b = 0; b < a.bits_per_symbol; ++b)
            label = (label << 1) | (bits[pos++] & 1);
        x.v[s] = a.points[label];
    }
    return x;
}

std::vector<uint8_t> demap_symbols(const DDGrid& x_hat, const ModAlphabet& a) {
    std::vector<uint8_t> bits;
    bits.reserve(x_hat.size() * a.bits_per_symbol);
    for (const cd& z : x_hat.v) {
        int best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (int i = 0; i < a.order(); ++i) {
            const double d = std::norm(z - a.points[i]);
            if (d < best_d) { // strict: ties keep the smaller index
                best_d = d;
                best = i;
            }
        }
        for (int b = a.bits_per_symbol - 1; b >= 0; --b)
            bits.push_back(static_cast<uint8_t>((best >> b) & 1));
    }
    return bits;
}

} // namespace otfs
