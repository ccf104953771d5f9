#pragma once

#include <complex>

namespace otfs::fft {

// 1D DFT passes over an n_rows x n_cols row-major buffer, in place.
// sign -1 applies e^{-j2pi...} (forward), sign +1 the inverse kernel,
// no normalization. Backed by FFTW with a thread-safe plan cache;
// concurrent calls on distinct buffers are fine.
void transform_rows(std::complex<double>* data, int n_rows, int n_cols, int sign);
void transform_cols(std::complex<double>* data, int n_rows, int n_cols, int sign);

} // namespace otfs::fft
