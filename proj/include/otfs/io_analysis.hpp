#pragma once

#include <functional>
#include <string>

#include "otfs/channel.hpp"
#include "otfs/grid.hpp"
#include "otfs/params.hpp"
#include "otfs/quadrature.hpp"

namespace otfs {

// Half-supports of the bi-orthogonal cross-ambiguity rectangle.
struct PulseConstraints {
    double t_max = 0; // seconds
    double f_max = 0; // Hz

    // Midpoints of the feasible intervals, with the tightened delay bound
    // tau_max + 2T/M so negative Doppler is always safe.
    static PulseConstraints defaults_for(const OtfsParams& p);
};

struct ConstraintReport {
    bool tightened = false; // channel contains a negative-Doppler path
    bool t_lower_ok = false, t_upper_ok = false;
    bool f_lower_ok = false, f_upper_ok = false;
    double t_lower_bound = 0, t_upper_bound = 0;
    double f_lower_bound = 0, f_upper_bound = 0;

    bool pass() const { return t_lower_ok && t_upper_ok && f_lower_ok && f_upper_ok; }
};

ConstraintReport validate_constraints(const OtfsParams& p, const PulseConstraints& pc,
                                      const ChannelRealization& ch);

// Which input-output coefficient generator drives a simulation or a
// sensing-matrix build.
enum class CoeffModel { IgnoreDse, IdealExact, IdealApprox, DdClosed, Rect };

CoeffModel coeff_model_from_name(const std::string& name);
std::string coeff_model_name(CoeffModel model);

// Truncated-sinc Fourier integrand of the exact time-frequency coefficient;
// exposed so the quadrature path and tests share one definition.
struct TfExactIntegrand {
    cd prefactor;      // beta_i |p_i| e^{j2pi p_i tau_i (nu_i - (m-m')df)}
    double sinc_rate;  // 2pi f_max
    double slope;      // 1 + p_i
    double offset;     // p_i tau_i - n' T
    double freq;       // f_c + m' df - p_i (m-m') df
    double tau1, tau2; // (n-n')T -+ t_max

    cd operator()(double tau) const;
    double peak_tau() const { return offset / slope; }
    double cycles_per_second() const;
};

TfExactIntegrand make_tf_exact_integrand(const PathParams& path, const OtfsParams& p,
                                         const PulseConstraints& pc,
                                         int n, int m, int np, int mp);

// Adaptive quadrature of the exact coefficient; abs convergence floor is
// rel_tol * |beta| so near-zero off-diagonal entries terminate too.
QuadResult tf_coeff_exact(const PathParams& path, const OtfsParams& p,
                          const PulseConstraints& pc,
                          int n, int m, int np, int mp, double rel_tol = 1e-8);

// Closed-form diagonal coefficient for ideal pulses (the nu=0 branch is the
// p -> infinity limit).
cd tf_coeff_ideal(const PathParams& path, const OtfsParams& p, int n, int m);

// Phase-offset approximation; with include_dse=false this is the classical
// coefficient that ignores the squint term.
cd tf_coeff_approx(const PathParams& path, const OtfsParams& p, int n, int m,
                   bool include_dse);

// Single-path delay-Doppler kernel for ideal pulses, indexed by circular
// differences k in [0,N), l in [0,M).
cd dd_kernel_ideal(const PathParams& path, const OtfsParams& p, int k, int l);

// Full kernel grid; the closed form factors into delay-only and
// Doppler-only terms, so this costs O(N+M) trig calls.
DDGrid dd_kernel_ideal_grid(const PathParams& path, const OtfsParams& p);

// ISI/ICI partition of the input delay index l' for rectangular pulses.
struct IndexSets {
    int isi_begin = 0, isi_end = 0; // [begin, end)
    int ici_begin = 0, ici_end = 0;

    bool is_isi(int lp) const { return lp >= isi_begin && lp < isi_end; }
    bool is_ici(int lp) const { return lp >= ici_begin && lp < ici_end; }
};

IndexSets index_sets(const PathParams& path, int M);

// Single-path rectangular-pulse kernel h^i_{k,l}[k',l'].
cd dd_kernel_rect(const PathParams& path, const OtfsParams& p,
                  int k, int l, int kp, int lp);

// Dictionary-atom generators: the atom at grid point (k, l) is a synthetic
// path with unit beta[k,l] gain (beta' = 1); k may be fractional and, unlike
// physical paths, l = 0 is allowed where the formulas extend to it.
cd sensing_basis_tf(const OtfsParams& p, double k, int l, int n, int m);
TFGrid tf_basis_grid_at(const OtfsParams& p, double k, int l);
DDGrid dd_kernel_ideal_grid_at(const OtfsParams& p, double k, int l);
DDGrid dd_rect_pilot_grid_at(const OtfsParams& p, double k, int l);

// Summed diagonal time-frequency coefficient grid H[n,m] for the diagonal
// models (IgnoreDse, IdealExact, IdealApprox).
TFGrid tf_coeff_grid(const ChannelRealization& ch, CoeffModel model);

// Y[n,m] = H[n,m] X[n,m]; rejects non-diagonal models.
TFGrid apply_ideal_channel(const TFGrid& X, const ChannelRealization& ch, CoeffModel model);

struct RectApplyOptions {
    bool truncate = false;
    double threshold = 1e-3; // fraction of the per-path kernel peak kept
};

// Direct double sum y[k,l] = sum_i sum_{k',l'} h^i_{k,l}[k',l'] x[k',l'].
DDGrid apply_rect_channel_dd(const DDGrid& x, const ChannelRealization& ch,
                             const RectApplyOptions& opts = {});

} // namespace otfs
