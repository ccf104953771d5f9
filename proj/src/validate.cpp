#include <cmath>
#include <vector>

#include "otfs/alphabet.hpp"
#include "otfs/channel.hpp"
#include "otfs/dirichlet.hpp"
#include "otfs/estimation.hpp"
#include "otfs/experiments.hpp"
#include "otfs/io_analysis.hpp"
#include "otfs/rng.hpp"
#include "otfs/transforms.hpp"
#include "otfs/waveform.hpp"

namespace otfs {
namespace {

cd polar1(double phase) { return cd(std::cos(phase), std::sin(phase)); }

// smallest grids that still satisfy the k_max > 1 and l_max > 1 invariants
OtfsParams tiny16x8() { return OtfsParams::make(16, 8, 15e3, 4e9, 2, 1.2); }

struct Check {
    std::string name;
    double measured;
    double threshold;
    bool pass;
};

// classical (no-squint) kernels evaluated from their own formulas; the
// limit suite compares the squint kernels at |p| = 1e15 against these
cd classical_ideal_kernel(const OtfsParams& p, const PathParams& path, int k, int l) {
    const int M = p.num_subcarriers, N = p.num_slots;
    const double dl = (path.delay_index - l) / static_cast<double>(M);
    const double dk = (path.doppler_index - k) / static_cast<double>(N);
    return path.beta_prime * polar1(M_PI * (-(M - 1) * dl + (N - 1) * dk)) *
           dirichlet_ratio(dl, M, M) * dirichlet_ratio(dk, N, N);
}

cd classical_rect_kernel(const OtfsParams& p, const PathParams& path,
                         int k, int l, int kp, int lp) {
    const int M = p.num_subcarriers, N = p.num_slots;
    const double a_delay = (path.delay_index + lp - l) / static_cast<double>(M);
    const double a_dopp = (path.doppler_index + kp - k) / static_cast<double>(N);
    const cd common = path.beta_prime * polar1(-M_PI * (M - 1) * a_delay) *
                      polar1(2.0 * M_PI * path.nu * lp * p.slot_duration / M);
    const bool isi = lp >= M - path.delay_index;
    if (isi)
        return common * dirichlet_ratio(a_delay, M, M) * dirichlet_ratio(a_dopp, N - 1, N) *
               polar1(M_PI * (path.doppler_index + kp - k)) *
               polar1(-2.0 * M_PI * (path.doppler_index + kp) / N);
    return common * dirichlet_ratio(a_delay, M, M) * dirichlet_ratio(a_dopp, N, N) *
           polar1(M_PI * (N - 1) * a_dopp);
}

Check quadrature_suite(const ExperimentConfig& cfg) {
    const OtfsParams p = tiny16x8();
    const PulseConstraints pc = PulseConstraints::defaults_for(p);
    const PathParams pos = PathParams::make(p, cd(0.6, -0.8), 2, 1.0);
    const PathParams neg = PathParams::make(p, cd(-0.3, 0.9), 1, -1.0);

    const int N = p.num_slots, M = p.num_subcarriers;
    std::vector<double> errs(static_cast<size_t>(N) * M, 0.0);
    std::vector<int> ok(static_cast<size_t>(N) * M, 1);
    parallel_for(static_cast<long>(N) * M, cfg.workers, [&](long idx) {
        const int n = static_cast<int>(idx % N);
        const int m = static_cast<int>(idx / N);
        const QuadResult q = tf_coeff_exact(pos, p, pc, n, m, n, m);
        const cd closed = tf_coeff_ideal(pos, p, n, m);
        errs[idx] = std::abs(q.value - closed) / std::abs(closed);
        ok[idx] = q.converged ? 1 : 0;
    });
    double max_err = 0;
    bool converged = true;
    for (size_t i = 0; i < errs.size(); ++i) {
        max_err = std::max(max_err, errs[i]);
        converged = converged && ok[i] == 1;
    }
    // negative-Doppler spot checks exercise the tightened-bound branch
    const int probe_nm[4][2] = {{0, 0}, {3, 5}, {7, 15}, {4, 8}};
    for (const auto& nm : probe_nm) {
        const QuadResult q = tf_coeff_exact(neg, p, pc, nm[0], nm[1], nm[0], nm[1]);
        const cd closed = tf_coeff_ideal(neg, p, nm[0], nm[1]);
        max_err = std::max(max_err, std::abs(q.value - closed) / std::abs(closed));
        converged = converged && q.converged;
    }
    return {"quadrature_vs_closed_form_rel_err", max_err, 1e-2, converged && max_err < 1e-2};
}

Check off_diagonal_suite(const ExperimentConfig& cfg) {
    (void)cfg;
    const OtfsParams p = tiny16x8();
    const PulseConstraints pc = PulseConstraints::defaults_for(p);
    const PathParams path = PathParams::make(p, cd(0.6, -0.8), 2, 1.0);
    const int probes[6][4] = {{1, 0, 0, 0}, {0, 0, 1, 0}, {2, 5, 1, 5},
                              {0, 1, 0, 0}, {0, 0, 0, 1}, {3, 3, 3, 2}};
    double worst = 0;
    for (const auto& q : probes) {
        const QuadResult off = tf_coeff_exact(path, p, pc, q[0], q[1], q[2], q[3], 1e-6);
        const QuadResult diag = tf_coeff_exact(path, p, pc, q[0], q[1], q[0], q[1], 1e-6);
        worst = std::max(worst, std::abs(off.value) / std::abs(diag.value));
    }
    return {"off_diagonal_max_ratio", worst, 1e-2, worst < 1e-2};
}

Check closed_form_suite() {
    struct Cfg {
        int M, N, l_max;
        double k_max, k;
        int l;
    };
    const Cfg cases[3] = {{16, 8, 3, 1.2, 1.0, 2}, {32, 16, 4, 2.5, 2.0, 3},
                          {64, 32, 6, 2.5, -2.0, 5}};
    double worst = 0;
    for (const Cfg& c : cases) {
        const OtfsParams p = OtfsParams::make(c.M, c.N, 15e3, 4e9, c.l_max, c.k_max);
        const PathParams path = PathParams::make(p, cd(0.7, -0.5), c.l, c.k);
        ChannelRealization ch;
        ch.params = p;
        ch.paths = {path};
        const DDGrid closed = dd_kernel_ideal_grid(path, p);
        const DDGrid exact = dd_kernel_from_tf_diag(tf_coeff_grid(ch, CoeffModel::IdealApprox), p);
        worst = std::max(worst, rel_error(closed, exact));
    }
    return {"dd_closed_vs_sfft_image_rel_err", worst, 5e-2, worst < 5e-2};
}

Check waveform_suite(const ExperimentConfig& cfg, bool corrupt) {
    const OtfsParams p = OtfsParams::make(32, 16, 15e3, 4e9, 4, 2.2);
    ChannelRealization ch;
    ch.params = p;
    ch.paths = {PathParams::make(p, cd(0.75, -0.35), 3, 2.0)};

    Rng rng(mix_seed(cfg.base_seed, 0xC));
    const ModAlphabet& qpsk = ModAlphabet::qpsk();
    std::vector<uint8_t> bits(static_cast<size_t>(p.grid_size()) * qpsk.bits_per_symbol);
    for (uint8_t& b : bits) b = static_cast<uint8_t>(rng.next_u64() >> 63);
    const DDGrid x = map_bits(bits, qpsk, p);

    DDGrid y_rect = apply_rect_channel_dd(x, ch);
    if (corrupt)
        for (cd& z : y_rect.v) z = -z;
    const TFGrid Y_pred = isfft(y_rect, p);

    const TFGrid X = isfft(x, p);
    const SampledWaveform s = heisenberg_rect(X, p, cfg.osf);
    const SampledWaveform r = apply_ltv_channel_time(s, ch);
    const TFGrid Y_wave = wigner_rect(r, p);

    // interior time rows only: row 0 has no in-frame ISI contributor
    double num = 0, den = 0;
    for (int n = 1; n < p.num_slots; ++n)
        for (int m = 0; m < p.num_subcarriers; ++m) {
            num += std::norm(Y_wave.at(n, m) - Y_pred.at(n, m));
            den += std::norm(Y_pred.at(n, m));
        }
    const double err = std::sqrt(num / den);
    return {"rect_kernel_vs_waveform_rel_err", err, 5e-2, err < 5e-2};
}

Check omp_domain_suite(const ExperimentConfig& cfg) {
    const OtfsParams p = OtfsParams::make(32, 16, 15e3, 4e9, 4, 2.2);
    const int k_span = 2, l_span = 4;
    const SensingMatrix phi_tf = build_sensing_tf(p, k_span, l_span);
    const SensingMatrix phi_dd = build_sensing_dd(p, k_span, l_span, CoeffModel::IdealApprox);
    const double v = 2.2 * p.subcarrier_spacing / p.num_slots * kSpeedOfLight / p.carrier_freq;

    int mismatches = 0;
    double max_gain_dev = 0;
    const PilotConfig pilot{cd(1.0, 0.0), 0.0};
    for (int trial = 0; trial < 100; ++trial) {
        const ChannelRealization ch =
            draw_channel(p, 3, v * 0.999, mix_seed(cfg.base_seed, 0xD, trial));
        const TFGrid Y = apply_ideal_channel(isfft(build_pilot(pilot, p), p), ch,
                                             CoeffModel::IdealApprox);
        const CVec y_tf = vec_tf(Y) / (std::abs(pilot.x_p) * phi_tf.scale_factor());
        const CVec y_dd = vec_dd(sfft(Y, p)) / (std::abs(pilot.x_p) * phi_dd.scale_factor());
        const EstimationResult tf = omp_estimate(y_tf, phi_tf, {3, 0.0});
        const EstimationResult dd = omp_estimate(y_dd, phi_dd, {3, 0.0});
        if (tf.support != dd.support) {
            ++mismatches;
            continue;
        }
        for (int j = 0; j < tf.iterations; ++j)
            max_gain_dev = std::max(max_gain_dev, std::abs(tf.beta_hat(j) - dd.beta_hat(j)));
    }
    const bool pass = mismatches == 0 && max_gain_dev < 1e-8;
    return {"tf_dd_omp_gain_dev", max_gain_dev, 1e-8, pass};
}

Check limit_suite() {
    // f_c chosen so |p| = f_c/nu = 1e15 at k = 1
    const OtfsParams p = OtfsParams::make(16, 8, 15e3, 1.875e18, 2, 1.2);
    const PathParams path = PathParams::make(p, cd(0.9, 0.4), 2, 1.0);
    double worst = 0;
    for (int k = 0; k < p.num_slots; ++k)
        for (int l = 0; l < p.num_subcarriers; ++l) {
            const cd got = dd_kernel_ideal(path, p, k, l);
            const cd want = classical_ideal_kernel(p, path, k, l);
            worst = std::max(worst, std::abs(got - want));
        }
    for (int k = 0; k < p.num_slots; k += 3)
        for (int l = 0; l < p.num_subcarriers; l += 5)
            for (int lp : {0, 13, 14, 15}) // spans both ICI and ISI for l_i = 2
                for (int kp : {0, 3, 7}) {
                    const cd got = dd_kernel_rect(path, p, k, l, kp, lp);
                    const cd want = classical_rect_kernel(p, path, k, l, kp, lp);
                    worst = std::max(worst, std::abs(got - want));
                }
    // kernels are O(1); absolute deviation doubles as a relative bound
    return {"limit_consistency_dev", worst, 1e-9, worst < 1e-9};
}

} // namespace

ResultTable run_validate(const ExperimentConfig& cfg, const ValidateOptions& opts) {
    ResultTable table;
    std::vector<Check> checks;
    if (opts.corrupt_rect_kernel) {
        // negative control: only the suite under attack runs
        checks.push_back(waveform_suite(cfg, true));
    } else {
        checks.push_back(quadrature_suite(cfg));
        checks.push_back(off_diagonal_suite(cfg));
        checks.push_back(closed_form_suite());
        checks.push_back(waveform_suite(cfg, false));
        checks.push_back(omp_domain_suite(cfg));
        checks.push_back(limit_suite());
    }
    long point = 0;
    for (const Check& c : checks) {
        table.add(c.measured, c.name, c.measured, 1, cfg.base_seed, point);
        table.add(c.threshold, c.name + "_pass", c.pass ? 1.0 : 0.0, 1, cfg.base_seed, point);
        table.all_pass = table.all_pass && c.pass;
        ++point;
    }
    table.note("scenario", "validate");
    table.note("base_seed", std::to_string(cfg.base_seed));
    return table;
}

} // namespace otfs
