#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "otfs/params.hpp"

namespace otfs {

using cd = std::complex<double>;

// N x M complex symbol grid, row-major. Rows run over the Doppler/time
// index, columns over the delay/frequency index. The tag keeps the
// delay-Doppler and time-frequency domains as distinct types.
template <typename Tag>
struct Grid {
    int n_rows = 0;
    int n_cols = 0;
    std::vector<cd> v;

    Grid() = default;
    Grid(int rows, int cols) : n_rows(rows), n_cols(cols), v(static_cast<size_t>(rows) * cols) {}

    cd& at(int r, int c) { return v[static_cast<size_t>(r) * n_cols + c]; }
    const cd& at(int r, int c) const { return v[static_cast<size_t>(r) * n_cols + c]; }

    size_t size() const { return v.size(); }
    cd* data() { return v.data(); }
    const cd* data() const { return v.data(); }

    bool matches(const OtfsParams& p) const {
        return n_rows == p.num_slots && n_cols == p.num_subcarriers;
    }

    double frobenius() const {
        double s = 0;
        for (const cd& z : v) s += std::norm(z);
        return std::sqrt(s);
    }

    void fill(cd value) { std::fill(v.begin(), v.end(), value); }
};

struct DdTag {};
struct TfTag {};

using DDGrid = Grid<DdTag>; // entry (k,l): Doppler row k, delay column l
using TFGrid = Grid<TfTag>; // entry (n,m): time row n, frequency column m

template <typename Tag>
double rel_error(const Grid<Tag>& a, const Grid<Tag>& b) {
    double num = 0, den = 0;
    for (size_t i = 0; i < a.v.size(); ++i) {
        num += std::norm(a.v[i] - b.v[i]);
        den += std::norm(b.v[i]);
    }
    return den > 0 ? std::sqrt(num / den) : std::sqrt(num);
}

} // namespace otfs
