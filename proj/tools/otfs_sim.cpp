#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>

#include "otfs/channel.hpp"
#include "otfs/estimation.hpp"
#include "otfs/experiments.hpp"
#include "otfs/io_analysis.hpp"

namespace {

struct CommonArgs {
    std::string config_path;
    std::string out_path;
    uint64_t seed = 0;
    bool seed_set = false;
    int trials = 0;
    int workers = 0;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "key=value config file");
    cmd->add_option("--out", args.out_path, "CSV output path (metadata sidecar alongside)");
    cmd->add_option("--seed", args.seed, "base seed for the deterministic trial streams")
        ->each([&args](const std::string&) { args.seed_set = true; });
    cmd->add_option("--trials", args.trials, "Monte-Carlo trials per sweep point");
    cmd->add_option("--workers", args.workers, "worker threads (0 = hardware)");
}

otfs::ExperimentConfig resolve(const CommonArgs& args, otfs::ExperimentConfig defaults,
                               const std::string& scenario) {
    otfs::ExperimentConfig cfg =
        args.config_path.empty() ? defaults : otfs::load_config(args.config_path);
    if (args.seed_set) cfg.base_seed = args.seed;
    if (args.trials > 0) cfg.trials = args.trials;
    if (args.workers > 0) cfg.workers = args.workers;
    if (!args.out_path.empty()) cfg.out_path = args.out_path;
    cfg.scenario = scenario;
    return cfg;
}

int emit(const otfs::ResultTable& table, const otfs::ExperimentConfig& cfg) {
    table.write_csv(std::cout);
    if (!cfg.out_path.empty()) {
        table.save(cfg.out_path);
        std::cerr << "wrote " << cfg.out_path << " and " << cfg.out_path << ".meta.txt\n";
    }
    return 0;
}

int run_analyze(const CommonArgs& args, const std::string& model_name, double k, int l,
                double speed_kmh, int M, int N) {
    otfs::ExperimentConfig cfg =
        args.config_path.empty() ? otfs::ExperimentConfig{} : otfs::load_config(args.config_path);
    if (M > 0) cfg.num_subcarriers = M;
    if (N > 0) cfg.num_slots = N;
    // delay cap only needs to admit the requested path on this grid
    cfg.l_max = std::clamp(std::max(l, 2), 2, cfg.num_subcarriers - 1);
    const otfs::OtfsParams params = cfg.params_for(cfg.num_subcarriers, speed_kmh);
    const otfs::CoeffModel model = otfs::coeff_model_from_name(model_name);

    otfs::TFGrid tf;
    otfs::DDGrid dd;
    bool is_tf = false;
    switch (model) {
        case otfs::CoeffModel::DdClosed:
            dd = otfs::dd_kernel_ideal_grid_at(params, k, l);
            break;
        case otfs::CoeffModel::Rect:
            dd = otfs::dd_rect_pilot_grid_at(params, k, l);
            break;
        default: {
            const otfs::PathParams path = otfs::PathParams::make(params, otfs::cd(1.0, 0.0), l, k);
            otfs::ChannelRealization ch;
            ch.params = params;
            ch.paths = {path};
            tf = otfs::tf_coeff_grid(ch, model);
            is_tf = true;
            break;
        }
    }

    std::ostream* os = &std::cout;
    std::ofstream file;
    if (!args.out_path.empty()) {
        file.open(args.out_path);
        if (!file) {
            std::cerr << "cannot write " << args.out_path << "\n";
            return 1;
        }
        os = &file;
    }
    (*os) << "row_index,col_index,real,imag,modulus\n";
    os->precision(12);
    const int rows = is_tf ? tf.n_rows : dd.n_rows;
    const int cols = is_tf ? tf.n_cols : dd.n_cols;
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) {
            const otfs::cd z = is_tf ? tf.at(r, c) : dd.at(r, c);
            (*os) << r << "," << c << "," << z.real() << "," << z.imag() << ","
                  << std::abs(z) << "\n";
        }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"OTFS link-level simulator with Doppler-squint channel modeling"};
    app.require_subcommand(1);

    CommonArgs sig_nmse_args, sig_ber_args, est_snr_args, est_m_args, est_ber_args,
        validate_args, analyze_args;

    CLI::App* sig_nmse = app.add_subcommand(
        "sig-nmse", "delay-Doppler CSI deviation of squint-blind and closed-form models vs M");
    add_common(sig_nmse, sig_nmse_args);

    CLI::App* sig_ber = app.add_subcommand(
        "sig-ber", "BER with perfect path knowledge under the three CSI models");
    add_common(sig_ber, sig_ber_args);

    CLI::App* est_snr = app.add_subcommand(
        "est-nmse-snr", "OMP vs threshold channel-estimation NMSE against pilot SNR");
    add_common(est_snr, est_snr_args);

    CLI::App* est_m = app.add_subcommand(
        "est-nmse-m", "OMP vs threshold channel-estimation NMSE against M");
    add_common(est_m, est_m_args);

    CLI::App* est_ber = app.add_subcommand(
        "est-ber", "end-to-end BER with estimated CSI (OMP, threshold, perfect reference)");
    add_common(est_ber, est_ber_args);

    CLI::App* validate = app.add_subcommand(
        "validate", "cross-model oracle suites; nonzero exit on any failure");
    add_common(validate, validate_args);

    CLI::App* analyze = app.add_subcommand(
        "analyze", "dump a single-path coefficient grid as CSV");
    add_common(analyze, analyze_args);
    std::string analyze_model = "ideal-exact";
    double analyze_k = 4.0, analyze_speed = 500.0;
    int analyze_l = 3, analyze_m = 0, analyze_n = 0;
    analyze->add_option("--model", analyze_model,
                        "ignore-dse | ideal-exact | ideal-approx | dd-closed | rect");
    analyze->add_option("--doppler-index", analyze_k, "path Doppler index k (may be fractional)");
    analyze->add_option("--delay-index", analyze_l, "path delay index l");
    analyze->add_option("--speed-kmh", analyze_speed, "speed fixing the Doppler cap");
    analyze->add_option("--num-subcarriers", analyze_m, "override M");
    analyze->add_option("--num-slots", analyze_n, "override N");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sig_nmse->parsed()) {
            otfs::ExperimentConfig d;
            d.trials = 100;
            const otfs::ExperimentConfig cfg = resolve(sig_nmse_args, d, "sig-nmse");
            return emit(otfs::run_sig_nmse(cfg), cfg);
        }
        if (sig_ber->parsed()) {
            otfs::ExperimentConfig d;
            d.speeds_kmh = {500};
            d.trials = 16;
            const otfs::ExperimentConfig cfg = resolve(sig_ber_args, d, "sig-ber");
            return emit(otfs::run_sig_ber(cfg), cfg);
        }
        if (est_snr->parsed()) {
            otfs::ExperimentConfig d;
            d.num_subcarriers = 128;
            d.num_slots = 64;
            d.trials = 200;
            const otfs::ExperimentConfig cfg = resolve(est_snr_args, d, "est-nmse-snr");
            return emit(otfs::run_est_nmse_snr(cfg), cfg);
        }
        if (est_m->parsed()) {
            otfs::ExperimentConfig d;
            d.m_sweep = {128, 256, 512, 1024};
            d.speeds_kmh = {100, 500};
            d.trials = 50;
            const otfs::ExperimentConfig cfg = resolve(est_m_args, d, "est-nmse-m");
            return emit(otfs::run_est_nmse_m(cfg), cfg);
        }
        if (est_ber->parsed()) {
            otfs::ExperimentConfig d;
            d.num_subcarriers = 128;
            d.num_slots = 64;
            d.speeds_kmh = {500};
            d.trials = 200;
            const otfs::ExperimentConfig cfg = resolve(est_ber_args, d, "est-ber");
            return emit(otfs::run_est_ber(cfg), cfg);
        }
        if (validate->parsed()) {
            otfs::ExperimentConfig d;
            const otfs::ExperimentConfig cfg = resolve(validate_args, d, "validate");
            const otfs::ResultTable table = otfs::run_validate(cfg);
            for (size_t i = 0; i + 1 < table.rows.size(); i += 2) {
                const auto& value = table.rows[i];
                const auto& pass = table.rows[i + 1];
                std::printf("[%s] %-32s measured %.3e  threshold %.3e\n",
                            pass.mean > 0 ? "PASS" : "FAIL", value.metric.c_str(), value.mean,
                            pass.sweep_value);
            }
            if (!cfg.out_path.empty()) table.save(cfg.out_path);
            return table.all_pass ? 0 : 1;
        }
        if (analyze->parsed()) {
            return run_analyze(analyze_args, analyze_model, analyze_k, analyze_l, analyze_speed,
                               analyze_m, analyze_n);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
