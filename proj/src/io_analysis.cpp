#include "otfs/io_analysis.hpp"

#include <cmath>
#include <stdexcept>

#include "otfs/dirichlet.hpp"

namespace otfs {
namespace {

cd polar1(double phase) { return cd(std::cos(phase), std::sin(phase)); }

// Everything the closed-form kernels need from a path or dictionary atom.
struct KernelSpec {
    double ki = 0;      // Doppler index (may be fractional)
    int li = 0;         // delay index
    double nu = 0;      // Hz
    double inv_p = 0;   // nu / f_c
    cd beta_prime = 1.0;
};

KernelSpec spec_from_path(const PathParams& path) {
    KernelSpec s;
    s.ki = path.doppler_index;
    s.li = path.delay_index;
    s.nu = path.nu;
    s.inv_p = path.inv_p();
    s.beta_prime = path.beta_prime;
    return s;
}

KernelSpec spec_from_atom(const OtfsParams& p, double k, int l) {
    KernelSpec s;
    s.ki = k;
    s.li = l;
    s.nu = k * p.subcarrier_spacing / p.num_slots;
    s.inv_p = s.nu / p.carrier_freq;
    s.beta_prime = 1.0;
    return s;
}

// First l' of the ISI range as printed in the closed form (the complement
// is ICI). The positive-squint convention excludes the boundary column.
int printed_isi_begin(int li, bool positive_p, int M) {
    return positive_p ? M - li + 1 : M - li;
}

// The sampled receiver reads the boundary column l' = M - l_i from the
// previous slot for either squint sign whenever |p| > MN (the read position
// nT - tau_i + nT/p stays in slot n-1), so the kernel evaluates it on the
// ISI branch regardless of sign.
int kernel_isi_begin(int li, int M) { return M - li; }

DDGrid dd_ideal_grid(const OtfsParams& p, const KernelSpec& s) {
    const int M = p.num_subcarriers, N = p.num_slots;
    const double q = s.inv_p;
    std::vector<cd> delay_f(M), doppler_f(N);
    for (int l = 0; l < M; ++l) {
        const double dl = (s.li - l) / static_cast<double>(M);
        delay_f[l] = polar1(-M_PI * (M - 1) * dl) * dirichlet_ratio(dl - (N - 1) * q / 2.0, M, M);
    }
    for (int k = 0; k < N; ++k) {
        const double dk = (s.ki - k) / static_cast<double>(N);
        doppler_f[k] = polar1(M_PI * (N - 1) * dk) * dirichlet_ratio(dk + (M - 1) * q / 2.0, N, N);
    }
    const cd common = s.beta_prime * polar1(M_PI * (M - 1) * (N - 1) * q / 2.0);
    DDGrid h(N, M);
    for (int k = 0; k < N; ++k) {
        const cd row = common * doppler_f[k];
        for (int l = 0; l < M; ++l) h.at(k, l) = row * delay_f[l];
    }
    return h;
}

cd dd_rect_scalar(const OtfsParams& p, const KernelSpec& s, int k, int l, int kp, int lp) {
    const int M = p.num_subcarriers, N = p.num_slots;
    const double q = s.inv_p;
    const double a_delay = (s.li + lp - l) / static_cast<double>(M);
    const double a_dopp = (s.ki + kp - k) / static_cast<double>(N);
    const cd common = s.beta_prime * polar1(-M_PI * (M - 1) * a_delay) *
                      polar1(2.0 * M_PI * s.nu * lp * p.slot_duration / M);
    if (lp >= kernel_isi_begin(s.li, M)) {
        return common *
               dirichlet_ratio(a_delay - (N - 2) * q / 2.0, M, M) *
               dirichlet_ratio(a_dopp + (M - 1) * q / 2.0, N - 1, N) *
               polar1(M_PI * (s.ki + kp - k)) *
               polar1(M_PI * (N - 2) * (M - 1) * q / 2.0) *
               polar1(-2.0 * M_PI * (s.ki + kp) / N);
    }
    return common *
           dirichlet_ratio(a_delay - (N - 1) * q / 2.0, M, M) *
           dirichlet_ratio(a_dopp + (M - 1) * q / 2.0, N, N) *
           polar1(M_PI * (N - 1) * a_dopp) *
           polar1(M_PI * (N - 1) * (M - 1) * q / 2.0);
}

// Branch pieces of the rectangular kernel, tabulated once per path so the
// frame application runs on complex multiplies only.
struct RectFactors {
    int isi_begin = 0;
    cd c_isi, c_ici;                      // l'-independent branch constants
    std::vector<cd> delay_isi, delay_ici; // over t = l' - l + (M-1)
    std::vector<cd> dopp_isi, dopp_ici;   // over s = k' - k + (N-1)
    std::vector<cd> p_lp;                 // e^{j2pi nu l' T / M}
    std::vector<cd> q_kp;                 // e^{-j2pi (k_i + k')/N}, ISI only
};

RectFactors make_rect_factors(const OtfsParams& p, const KernelSpec& spec) {
    const int M = p.num_subcarriers, N = p.num_slots;
    const double q = spec.inv_p;
    RectFactors rf;
    rf.isi_begin = kernel_isi_begin(spec.li, M);
    rf.c_isi = polar1(M_PI * (N - 2) * (M - 1) * q / 2.0);
    rf.c_ici = polar1(M_PI * (N - 1) * (M - 1) * q / 2.0);
    rf.delay_isi.resize(2 * M - 1);
    rf.delay_ici.resize(2 * M - 1);
    for (int t = -(M - 1); t <= M - 1; ++t) {
        const double a = (spec.li + t) / static_cast<double>(M);
        const cd ph = polar1(-M_PI * (M - 1) * a);
        rf.delay_isi[t + M - 1] = ph * dirichlet_ratio(a - (N - 2) * q / 2.0, M, M);
        rf.delay_ici[t + M - 1] = ph * dirichlet_ratio(a - (N - 1) * q / 2.0, M, M);
    }
    rf.dopp_isi.resize(2 * N - 1);
    rf.dopp_ici.resize(2 * N - 1);
    for (int s = -(N - 1); s <= N - 1; ++s) {
        const double a = (spec.ki + s) / static_cast<double>(N);
        rf.dopp_isi[s + N - 1] = polar1(M_PI * (spec.ki + s)) *
                                 dirichlet_ratio(a + (M - 1) * q / 2.0, N - 1, N);
        rf.dopp_ici[s + N - 1] = polar1(M_PI * (N - 1) * a) *
                                 dirichlet_ratio(a + (M - 1) * q / 2.0, N, N);
    }
    rf.p_lp.resize(M);
    rf.q_kp.resize(N);
    for (int lp = 0; lp < M; ++lp)
        rf.p_lp[lp] = polar1(2.0 * M_PI * spec.nu * lp * p.slot_duration / M);
    for (int kp = 0; kp < N; ++kp)
        rf.q_kp[kp] = polar1(-2.0 * M_PI * (spec.ki + kp) / N);
    return rf;
}

void accumulate_rect(DDGrid& y, const DDGrid& x, const OtfsParams& p,
                     const KernelSpec& spec, const RectApplyOptions& opts) {
    const int M = p.num_subcarriers, N = p.num_slots;
    const RectFactors rf = make_rect_factors(p, spec);
    for (int k = 0; k < N; ++k) {
        for (int l = 0; l < M; ++l) {
            cd acc = 0;
            for (int lp = 0; lp < M; ++lp) {
                const bool isi = lp >= rf.isi_begin;
                const cd& wl = (isi ? rf.delay_isi : rf.delay_ici)[lp - l + M - 1];
                if (opts.truncate && std::abs(wl) < opts.threshold) continue;
                const std::vector<cd>& dopp = isi ? rf.dopp_isi : rf.dopp_ici;
                cd inner = 0;
                if (isi) {
                    for (int kp = 0; kp < N; ++kp)
                        inner += rf.q_kp[kp] * dopp[kp - k + N - 1] * x.at(kp, lp);
                } else {
                    for (int kp = 0; kp < N; ++kp)
                        inner += dopp[kp - k + N - 1] * x.at(kp, lp);
                }
                acc += (isi ? rf.c_isi : rf.c_ici) * wl * rf.p_lp[lp] * inner;
            }
            y.at(k, l) += spec.beta_prime * acc;
        }
    }
}

} // namespace

PulseConstraints PulseConstraints::defaults_for(const OtfsParams& p) {
    const double T = p.slot_duration;
    PulseConstraints pc;
    pc.t_max = 0.5 * ((p.tau_max() + 2.0 * T / p.num_subcarriers) + T / 2.0);
    pc.f_max = 0.5 * ((2.0 * p.nu_max() + p.subcarrier_spacing / p.num_slots) +
                      p.subcarrier_spacing / 2.0);
    return pc;
}

ConstraintReport validate_constraints(const OtfsParams& p, const PulseConstraints& pc,
                                      const ChannelRealization& ch) {
    ConstraintReport r;
    for (const PathParams& path : ch.paths)
        if (path.nu < 0) r.tightened = true;
    const double T = p.slot_duration;
    const double guard = (r.tightened ? 2.0 : 1.0) * T / p.num_subcarriers;
    r.t_lower_bound = p.tau_max() + guard;
    r.t_upper_bound = T / 2.0;
    r.f_lower_bound = 2.0 * p.nu_max() + p.subcarrier_spacing / p.num_slots;
    r.f_upper_bound = p.subcarrier_spacing / 2.0;
    r.t_lower_ok = pc.t_max > r.t_lower_bound;
    r.t_upper_ok = pc.t_max < r.t_upper_bound;
    r.f_lower_ok = pc.f_max > r.f_lower_bound;
    r.f_upper_ok = pc.f_max < r.f_upper_bound;
    return r;
}

CoeffModel coeff_model_from_name(const std::string& name) {
    if (name == "ignore-dse") return CoeffModel::IgnoreDse;
    if (name == "ideal-exact") return CoeffModel::IdealExact;
    if (name == "ideal-approx") return CoeffModel::IdealApprox;
    if (name == "dd-closed") return CoeffModel::DdClosed;
    if (name == "rect") return CoeffModel::Rect;
    throw std::invalid_argument("unknown coefficient model: " + name);
}

std::string coeff_model_name(CoeffModel model) {
    switch (model) {
        case CoeffModel::IgnoreDse: return "ignore-dse";
        case CoeffModel::IdealExact: return "ideal-exact";
        case CoeffModel::IdealApprox: return "ideal-approx";
        case CoeffModel::DdClosed: return "dd-closed";
        case CoeffModel::Rect: return "rect";
    }
    return "?";
}

cd TfExactIntegrand::operator()(double tau) const {
    const double g = slope * tau - offset;
    const double arg = sinc_rate * g;
    double kernel;
    if (std::abs(arg) < 1e-8)
        kernel = (sinc_rate / M_PI) * (1.0 - arg * arg / 6.0);
    else
        kernel = std::sin(arg) / (M_PI * g);
    return kernel * polar1(-2.0 * M_PI * freq * tau);
}

double TfExactIntegrand::cycles_per_second() const {
    return std::abs(slope) * sinc_rate / (2.0 * M_PI) + std::abs(freq);
}

TfExactIntegrand make_tf_exact_integrand(const PathParams& path, const OtfsParams& p,
                                         const PulseConstraints& pc,
                                         int n, int m, int np, int mp) {
    if (!path.has_doppler)
        throw std::domain_error("tf_coeff_exact: the dense-branch integral needs nu_i != 0");
    const double p_i = path.p();
    const double df = p.subcarrier_spacing;
    TfExactIntegrand f;
    // |p_i| carries the response modulus (the dense-branch kernel has
    // |f_c/nu_i|); the signed ratio lives in the phases only
    f.prefactor = path.beta * std::abs(p_i) *
                  polar1(2.0 * M_PI * p_i * path.tau * (path.nu - (m - mp) * df));
    f.sinc_rate = 2.0 * M_PI * pc.f_max;
    f.slope = 1.0 + p_i;
    f.offset = p_i * path.tau - np * p.slot_duration;
    f.freq = p.carrier_freq + mp * df - p_i * (m - mp) * df;
    f.tau1 = (n - np) * p.slot_duration - pc.t_max;
    f.tau2 = (n - np) * p.slot_duration + pc.t_max;
    return f;
}

QuadResult tf_coeff_exact(const PathParams& path, const OtfsParams& p,
                          const PulseConstraints& pc,
                          int n, int m, int np, int mp, double rel_tol) {
    if (rel_tol <= 0) throw std::invalid_argument("tf_coeff_exact: rel_tol must be positive");
    const TfExactIntegrand f = make_tf_exact_integrand(path, p, pc, n, m, np, mp);
    const double pref_mag = std::abs(f.prefactor);
    // coefficient-level floor rel_tol*|beta| mapped to the raw integral
    const double abs_tol = pref_mag > 0 ? rel_tol * std::abs(path.beta) / pref_mag : 1.0;
    QuadResult q = integrate_oscillatory([&f](double tau) { return f(tau); },
                                         f.tau1, f.tau2, f.cycles_per_second(),
                                         rel_tol, abs_tol);
    q.value *= f.prefactor;
    q.abs_error *= pref_mag;
    return q;
}

cd tf_coeff_ideal(const PathParams& path, const OtfsParams& p, int n, int m) {
    if (!path.has_doppler) {
        // limit p -> infinity: beta e^{-j2pi tau m df}, independent of n
        return path.beta * polar1(-2.0 * M_PI * path.delay_index * m / p.num_subcarriers);
    }
    const double q = path.inv_p();
    const double g = (path.tau - n * p.slot_duration * q) / (1.0 + q);
    const double phase = 2.0 * M_PI * (path.tau * p.carrier_freq -
                                       (m * p.subcarrier_spacing + p.carrier_freq) * g);
    return path.beta / std::abs(1.0 + q) * polar1(phase);
}

cd tf_coeff_approx(const PathParams& path, const OtfsParams& p, int n, int m,
                   bool include_dse) {
    double phase = 2.0 * M_PI * (path.doppler_index * n / p.num_slots -
                                 static_cast<double>(path.delay_index) * m / p.num_subcarriers);
    if (include_dse) phase += 2.0 * M_PI * static_cast<double>(m) * n * path.inv_p();
    return path.beta_prime * polar1(phase);
}

cd dd_kernel_ideal(const PathParams& path, const OtfsParams& p, int k, int l) {
    const int M = p.num_subcarriers, N = p.num_slots;
    const KernelSpec s = spec_from_path(path);
    const double q = s.inv_p;
    const double dl = (s.li - l) / static_cast<double>(M);
    const double dk = (s.ki - k) / static_cast<double>(N);
    const cd phase = polar1(M_PI * (-(M - 1) * dl + (N - 1) * dk + (M - 1) * (N - 1) * q / 2.0));
    return s.beta_prime * phase *
           dirichlet_ratio(dl - (N - 1) * q / 2.0, M, M) *
           dirichlet_ratio(dk + (M - 1) * q / 2.0, N, N);
}

DDGrid dd_kernel_ideal_grid(const PathParams& path, const OtfsParams& p) {
    return dd_ideal_grid(p, spec_from_path(path));
}

IndexSets index_sets(const PathParams& path, int M) {
    if (path.delay_index < 1)
        throw std::domain_error("index_sets: delay index must be at least 1");
    if (!path.has_doppler)
        throw std::domain_error("index_sets: nu_i = 0 carries no ISI/ICI split");
    IndexSets s;
    s.isi_begin = printed_isi_begin(path.delay_index, path.nu > 0, M);
    s.isi_end = M;
    s.ici_begin = 0;
    s.ici_end = s.isi_begin;
    return s;
}

cd dd_kernel_rect(const PathParams& path, const OtfsParams& p,
                  int k, int l, int kp, int lp) {
    const int M = p.num_subcarriers, N = p.num_slots;
    if (k < 0 || k >= N || l < 0 || l >= M || kp < 0 || kp >= N || lp < 0 || lp >= M)
        throw std::out_of_range("dd_kernel_rect: grid index out of range");
    return dd_rect_scalar(p, spec_from_path(path), k, l, kp, lp);
}

cd sensing_basis_tf(const OtfsParams& p, double k, int l, int n, int m) {
    const double inv_p = k * p.subcarrier_spacing / (p.num_slots * p.carrier_freq);
    const double phase = 2.0 * M_PI * (k * n / p.num_slots -
                                       static_cast<double>(l) * m / p.num_subcarriers +
                                       static_cast<double>(m) * n * inv_p);
    return polar1(phase);
}

TFGrid tf_basis_grid_at(const OtfsParams& p, double k, int l) {
    TFGrid g(p.num_slots, p.num_subcarriers);
    for (int n = 0; n < p.num_slots; ++n)
        for (int m = 0; m < p.num_subcarriers; ++m) g.at(n, m) = sensing_basis_tf(p, k, l, n, m);
    return g;
}

DDGrid dd_kernel_ideal_grid_at(const OtfsParams& p, double k, int l) {
    return dd_ideal_grid(p, spec_from_atom(p, k, l));
}

DDGrid dd_rect_pilot_grid_at(const OtfsParams& p, double k, int l) {
    const KernelSpec s = spec_from_atom(p, k, l);
    DDGrid h(p.num_slots, p.num_subcarriers);
    for (int ko = 0; ko < p.num_slots; ++ko)
        for (int lo = 0; lo < p.num_subcarriers; ++lo)
            h.at(ko, lo) = dd_rect_scalar(p, s, ko, lo, 0, 0);
    return h;
}

TFGrid tf_coeff_grid(const ChannelRealization& ch, CoeffModel model) {
    const OtfsParams& p = ch.params;
    TFGrid H(p.num_slots, p.num_subcarriers);
    switch (model) {
        case CoeffModel::IgnoreDse:
        case CoeffModel::IdealApprox:
            for (const PathParams& path : ch.paths)
                for (int n = 0; n < p.num_slots; ++n)
                    for (int m = 0; m < p.num_subcarriers; ++m)
                        H.at(n, m) += tf_coeff_approx(path, p, n, m,
                                                      model == CoeffModel::IdealApprox);
            break;
        case CoeffModel::IdealExact:
            for (const PathParams& path : ch.paths)
                for (int n = 0; n < p.num_slots; ++n)
                    for (int m = 0; m < p.num_subcarriers; ++m)
                        H.at(n, m) += tf_coeff_ideal(path, p, n, m);
            break;
        default:
            throw std::invalid_argument("tf_coeff_grid: model has no diagonal TF representation");
    }
    return H;
}

TFGrid apply_ideal_channel(const TFGrid& X, const ChannelRealization& ch, CoeffModel model) {
    if (model != CoeffModel::IgnoreDse && model != CoeffModel::IdealExact &&
        model != CoeffModel::IdealApprox)
        throw std::invalid_argument("apply_ideal_channel: rectangular channels act in the "
                                    "delay-Doppler domain, not per TF bin");
    if (!X.matches(ch.params))
        throw std::invalid_argument("apply_ideal_channel: grid dimensions do not match params");
    TFGrid H = tf_coeff_grid(ch, model);
    TFGrid Y(X.n_rows, X.n_cols);
    for (size_t i = 0; i < X.size(); ++i) Y.v[i] = H.v[i] * X.v[i];
    return Y;
}

DDGrid apply_rect_channel_dd(const DDGrid& x, const ChannelRealization& ch,
                             const RectApplyOptions& opts) {
    const OtfsParams& p = ch.params;
    if (!x.matches(p))
        throw std::invalid_argument("apply_rect_channel_dd: grid dimensions do not match params");
    DDGrid y(p.num_slots, p.num_subcarriers);
    for (const PathParams& path : ch.paths)
        accumulate_rect(y, x, p, spec_from_path(path), opts);
    return y;
}

} // namespace otfs
