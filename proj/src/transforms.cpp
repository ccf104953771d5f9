#include "otfs/transforms.hpp"

#include <cmath>
#include <stdexcept>

#include "otfs/fft.hpp"

namespace otfs {
namespace {

template <typename GridIn>
void check_dims(const GridIn& g, const OtfsParams& p, const char* what) {
    if (!g.matches(p))
        throw std::invalid_argument(std::string(what) + ": grid dimensions do not match params");
}

template <typename GridOut, typename GridIn>
GridOut symplectic(const GridIn& in, int row_sign, int col_sign, double scale) {
    GridOut out(in.n_rows, in.n_cols);
    out.v = in.v;
    // Doppler/time axis runs down the columns, delay/frequency along the rows.
    fft::transform_cols(out.data(), out.n_rows, out.n_cols, col_sign);
    fft::transform_rows(out.data(), out.n_rows, out.n_cols, row_sign);
    for (cd& z : out.v) z *= scale;
    return out;
}

} // namespace

TFGrid isfft(const DDGrid& x, const OtfsParams& p) {
    check_dims(x, p, "isfft");
    const double scale = 1.0 / std::sqrt(static_cast<double>(p.grid_size()));
    return symplectic<TFGrid>(x, -1, +1, scale);
}

DDGrid sfft(const TFGrid& Y, const OtfsParams& p) {
    check_dims(Y, p, "sfft");
    const double scale = 1.0 / std::sqrt(static_cast<double>(p.grid_size()));
    return symplectic<DDGrid>(Y, +1, -1, scale);
}

DDGrid dd_kernel_from_tf_diag(const TFGrid& H, const OtfsParams& p) {
    check_dims(H, p, "dd_kernel_from_tf_diag");
    const double scale = 1.0 / static_cast<double>(p.grid_size());
    return symplectic<DDGrid>(H, +1, -1, scale);
}

TFGrid tf_diag_from_dd_kernel(const DDGrid& h, const OtfsParams& p) {
    check_dims(h, p, "tf_diag_from_dd_kernel");
    return symplectic<TFGrid>(h, -1, +1, 1.0);
}

} // namespace otfs
