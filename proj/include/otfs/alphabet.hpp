#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "otfs/grid.hpp"

namespace otfs {

// Unit-energy Gray-mapped constellation. points[i] is the symbol whose
// bit label is i read MSB-first; labels of nearest neighbours differ in
// one bit.
struct ModAlphabet {
    std::string name;
    std::vector<cd> points;
    int bits_per_symbol = 0;

    int order() const { return static_cast<int>(points.size()); }

    static const ModAlphabet& qpsk();
    static const ModAlphabet& qam16();
    static const ModAlphabet& from_name(const std::string& name);
};

// Row-major fill of an N x M grid; needs exactly N*M*bits_per_symbol bits.
DDGrid map_bits(const std::vector<uint8_t>& bits, const ModAlphabet& a, const OtfsParams& p);

// Per-symbol minimum-distance hard decision; ties go to the smaller
// constellation index.
std::vector<uint8_t> demap_symbols(const DDGrid& x_hat, const ModAlphabet& a);

} // namespace otfs
