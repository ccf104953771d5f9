#pragma once

#include "otfs/grid.hpp"
#include "otfs/params.hpp"

namespace otfs {

// Inverse symplectic finite Fourier transform:
// X[n,m] = 1/sqrt(NM) sum_{k,l} x[k,l] e^{j2pi(nk/N - ml/M)}.
TFGrid isfft(const DDGrid& x, const OtfsParams& p);

// Forward counterpart, the exact inverse of isfft:
// y[k,l] = 1/sqrt(NM) sum_{n,m} Y[n,m] e^{-j2pi(nk/N - ml/M)}.
DDGrid sfft(const TFGrid& Y, const OtfsParams& p);

// Channel-kernel transform pair. A diagonal time-frequency response
// H[n,m] maps to the delay-Doppler kernel
//   h[k,l] = 1/(NM) sum_{n,m} H[n,m] e^{-j2pi(nk/N - ml/M)},
// so that y[k,l] = sum_{k',l'} h[(k-k')_N,(l-l')_M] x[k',l'] whenever
// Y[n,m] = H[n,m] X[n,m]. Differs from sfft by a 1/sqrt(NM) factor.
DDGrid dd_kernel_from_tf_diag(const TFGrid& H, const OtfsParams& p);
TFGrid tf_diag_from_dd_kernel(const DDGrid& h, const OtfsParams& p);

} // namespace otfs
