#pragma once

#include <complex>
#include <functional>

namespace otfs {

struct QuadResult {
    std::complex<double> value;
    double abs_error = 0;
    bool converged = false;
    long evaluations = 0;
};

// Adaptive Gauss-Kronrod (G7/K15) integration of a complex integrand over
// [a, b]. osc_freq (cycles per unit of the integration variable) sizes the
// initial uniform panels so no oscillation is stepped over; panels are then
// bisected worst-error-first until
//   total_error <= max(abs_tol, rel_tol * |integral|)
// or the evaluation budget runs out (converged = false, best estimate kept).
QuadResult integrate_oscillatory(const std::function<std::complex<double>(double)>& f,
                                 double a, double b, double osc_freq,
                                 double rel_tol, double abs_tol = 0.0,
                                 long max_evals = 80000000L);

} // namespace otfs
