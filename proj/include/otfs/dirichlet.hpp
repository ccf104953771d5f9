#pragma once

#include <cmath>
#include <cstdlib>

namespace otfs {

// Periodic ratio sin(pi*L*x) / (norm * sin(pi*x)). Writing x = q + d with
// integer q and |d| <= 1/2 gives (-1)^{(L-1)q} sin(pi*L*d)/(norm*sin(pi*d)),
// which stays fully accurate arbitrarily close to the singularities; at
// d = 0 the analytic limit (-1)^{(L-1)q} * L/norm applies.
inline double dirichlet_ratio(double x, int L, int norm) {
    const double q = std::nearbyint(x);
    const double d = x - q;
    const double sign = (static_cast<long long>(L - 1) * static_cast<long long>(q)) % 2 == 0 ? 1.0 : -1.0;
    if (std::abs(d) < 1e-12) {
        const double pd = M_PI * d;
        return sign * (static_cast<double>(L) / norm) * (1.0 - pd * pd * (static_cast<double>(L) * L - 1.0) / 6.0);
    }
    return sign * std::sin(M_PI * L * d) / (norm * std::sin(M_PI * d));
}

} // namespace otfs
