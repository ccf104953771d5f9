#include "otfs/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "otfs/alphabet.hpp"
#include "otfs/channel.hpp"
#include "otfs/estimation.hpp"
#include "otfs/link.hpp"
#include "otfs/rng.hpp"
#include "otfs/transforms.hpp"
#include "otfs/waveform.hpp"

#ifndef OTFS_BUILD_ID
#define OTFS_BUILD_ID "untracked"
#endif

namespace otfs {
namespace {

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(12);
    os << x;
    return os.str();
}

std::string speed_tag(double v_kmh) {
    std::ostringstream os;
    if (v_kmh == std::floor(v_kmh))
        os << "v" << static_cast<long>(v_kmh);
    else
        os << "v" << v_kmh;
    return os.str();
}

template <typename T>
std::string join(const std::vector<T>& xs) {
    std::ostringstream os;
    for (size_t i = 0; i < xs.size(); ++i) {
        if (i) os << ",";
        os << xs[i];
    }
    return os.str();
}

std::vector<double> parse_double_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(std::stod(item));
    }
    return out;
}

std::vector<uint8_t> random_bits(Rng& rng, size_t count) {
    std::vector<uint8_t> bits(count);
    for (size_t i = 0; i < count; ++i) bits[i] = static_cast<uint8_t>(rng.next_u64() >> 63);
    return bits;
}

TFGrid multiply(const TFGrid& H, const TFGrid& X) {
    TFGrid Y(H.n_rows, H.n_cols);
    for (size_t i = 0; i < H.size(); ++i) Y.v[i] = H.v[i] * X.v[i];
    return Y;
}

DDGrid closed_form_kernel(const ChannelRealization& ch) {
    DDGrid h(ch.params.num_slots, ch.params.num_subcarriers);
    for (const PathParams& path : ch.paths) {
        const DDGrid hp = dd_kernel_ideal_grid(path, ch.params);
        for (size_t i = 0; i < h.size(); ++i) h.v[i] += hp.v[i];
    }
    return h;
}

double grid_nmse(const DDGrid& truth, const DDGrid& est) {
    double num = 0, den = 0;
    for (size_t i = 0; i < truth.size(); ++i) {
        num += std::norm(truth.v[i] - est.v[i]);
        den += std::norm(truth.v[i]);
    }
    return num / den;
}

void echo_config(ResultTable& t, const ExperimentConfig& cfg) {
    t.note("scenario", cfg.scenario);
    t.note("carrier_frequency_hz", fmt(cfg.carrier_frequency_hz));
    t.note("subcarrier_spacing_hz", fmt(cfg.subcarrier_spacing_hz));
    t.note("num_subcarriers", std::to_string(cfg.num_subcarriers));
    t.note("num_slots", std::to_string(cfg.num_slots));
    t.note("speeds_kmh", join(cfg.speeds_kmh));
    t.note("alphabet", cfg.alphabet);
    t.note("l_max", std::to_string(cfg.l_max));
    t.note("num_paths", std::to_string(cfg.num_paths));
    t.note("m_sweep", join(cfg.m_sweep));
    t.note("snr_p_db", join(cfg.snr_p_db));
    t.note("ebn0_db", join(cfg.ebn0_db));
    t.note("pilot_snr_db", fmt(cfg.pilot_snr_db));
    t.note("trials", std::to_string(cfg.trials));
    t.note("data_frames", std::to_string(cfg.data_frames));
    t.note("base_seed", std::to_string(cfg.base_seed));
    t.note("model", cfg.model);
    t.note("osf", std::to_string(cfg.osf));
    t.note("build_id", OTFS_BUILD_ID);
}

struct Stopwatch {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

} // namespace

OtfsParams ExperimentConfig::params_for(int M, double speed_kmh) const {
    const double nu_max = speed_mps(speed_kmh) / kSpeedOfLight * carrier_frequency_hz;
    const double k_v = nu_max * num_slots / subcarrier_spacing_hz;
    const double k_cap = std::max(k_v + 1e-9, 1.25);
    return OtfsParams::make(M, num_slots, subcarrier_spacing_hz, carrier_frequency_hz,
                            l_max, k_cap);
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    ExperimentConfig cfg;
    std::string line;
    while (std::getline(in, line)) {
        const size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const size_t eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (!key.empty()) apply_config_line(cfg, key, value);
    }
    return cfg;
}

void apply_config_line(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "carrier_frequency_hz") cfg.carrier_frequency_hz = std::stod(value);
    else if (key == "subcarrier_spacing_hz") cfg.subcarrier_spacing_hz = std::stod(value);
    else if (key == "num_subcarriers") cfg.num_subcarriers = std::stoi(value);
    else if (key == "num_slots") cfg.num_slots = std::stoi(value);
    else if (key == "speeds_kmh") cfg.speeds_kmh = parse_double_list(value);
    else if (key == "alphabet") cfg.alphabet = value;
    else if (key == "l_max") cfg.l_max = std::stoi(value);
    else if (key == "num_paths") cfg.num_paths = std::stoi(value);
    else if (key == "m_sweep") {
        cfg.m_sweep.clear();
        for (double x : parse_double_list(value)) cfg.m_sweep.push_back(static_cast<int>(x));
    } else if (key == "snr_p_db") cfg.snr_p_db = parse_double_list(value);
    else if (key == "ebn0_db") cfg.ebn0_db = parse_double_list(value);
    else if (key == "pilot_snr_db") cfg.pilot_snr_db = std::stod(value);
    else if (key == "trials") cfg.trials = std::stoi(value);
    else if (key == "data_frames") cfg.data_frames = std::stoi(value);
    else if (key == "base_seed") cfg.base_seed = std::stoull(value);
    else if (key == "model") cfg.model = value;
    else if (key == "workers") cfg.workers = std::stoi(value);
    else if (key == "osf") cfg.osf = std::stoi(value);
    else if (key == "out") cfg.out_path = value;
    else throw std::invalid_argument("unknown config key: " + key);
}

void ResultTable::add(double sweep, const std::string& metric, double mean, long trials,
                      uint64_t seed, long point) {
    rows.push_back({sweep, metric, mean, trials, seed, point});
}

void ResultTable::note(const std::string& key, const std::string& value) {
    metadata.emplace_back(key, value);
}

double ResultTable::value_of(const std::string& metric, double sweep) const {
    for (const ResultRow& r : rows)
        if (r.metric == metric && r.sweep_value == sweep) return r.mean;
    throw std::out_of_range("ResultTable: no row " + metric + " at sweep " + fmt(sweep));
}

void ResultTable::write_csv(std::ostream& os) const {
    os << "sweep,metric,mean,trials,base_seed,point_index\n";
    for (const ResultRow& r : rows) {
        os.precision(12);
        os << r.sweep_value << "," << r.metric << "," << r.mean << "," << r.trial_count
           << "," << r.base_seed << "," << r.point_index << "\n";
    }
}

void ResultTable::save(const std::string& out_path) const {
    if (out_path.empty()) return;
    std::ofstream csv(out_path);
    if (!csv) throw std::runtime_error("cannot write " + out_path);
    write_csv(csv);
    std::ofstream meta(out_path + ".meta.txt");
    for (const auto& [k, v] : metadata) meta << k << ": " << v << "\n";
}

int resolve_workers(int requested) {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

void parallel_for(long count, int workers, const std::function<void(long)>& fn) {
    workers = std::min<long>(resolve_workers(workers), count);
    if (workers <= 1) {
        for (long i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<long> next{0};
    std::exception_ptr error;
    std::mutex error_mu;
    auto body = [&] {
        while (true) {
            const long i = next.fetch_add(1);
            if (i >= count) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mu);
                if (!error) error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(body);
    for (std::thread& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

ResultTable run_sig_nmse(const ExperimentConfig& cfg) {
    Stopwatch clock;
    ResultTable table;
    long point = 0;
    for (int M : cfg.m_sweep) {
        for (double v_kmh : cfg.speeds_kmh) {
            const OtfsParams params = cfg.params_for(M, v_kmh);
            const double v = cfg.speed_mps(v_kmh);
            std::vector<double> nmse_ignore(cfg.trials), nmse_closed(cfg.trials);
            parallel_for(cfg.trials, cfg.workers, [&](long trial) {
                const uint64_t seed = mix_seed(cfg.base_seed, point, trial);
                // coefficient-analysis scenario: cosine-projected Doppler
                const ChannelRealization ch =
                    draw_channel(params, cfg.num_paths, v, seed, DopplerGrid::Cosine);
                const DDGrid h_exact =
                    dd_kernel_from_tf_diag(tf_coeff_grid(ch, CoeffModel::IdealExact), params);
                const DDGrid h_ignore =
                    dd_kernel_from_tf_diag(tf_coeff_grid(ch, CoeffModel::IgnoreDse), params);
                const DDGrid h_closed = closed_form_kernel(ch);
                nmse_ignore[trial] = grid_nmse(h_exact, h_ignore);
                nmse_closed[trial] = grid_nmse(h_exact, h_closed);
            });
            double mean_ignore = 0, mean_closed = 0;
            for (int t = 0; t < cfg.trials; ++t) {
                mean_ignore += nmse_ignore[t];
                mean_closed += nmse_closed[t];
            }
            mean_ignore /= cfg.trials;
            mean_closed /= cfg.trials;
            table.add(M, "nmse_ignore_dse_" + speed_tag(v_kmh), mean_ignore, cfg.trials,
                      cfg.base_seed, point);
            table.add(M, "nmse_closed_form_" + speed_tag(v_kmh), mean_closed, cfg.trials,
                      cfg.base_seed, point);
            ++point;
        }
    }
    echo_config(table, cfg);
    table.note("wall_seconds", fmt(clock.seconds()));
    return table;
}

ResultTable run_sig_ber(const ExperimentConfig& cfg) {
    Stopwatch clock;
    ResultTable table;
    const ModAlphabet& alphabet = ModAlphabet::from_name(cfg.alphabet);
    const CoeffModel channel_model = coeff_model_from_name(cfg.model);
    long point = 0;
    for (double v_kmh : cfg.speeds_kmh) {
        const OtfsParams params = cfg.params_for(cfg.num_subcarriers, v_kmh);
        const double v = cfg.speed_mps(v_kmh);
        const size_t frame_bits = static_cast<size_t>(params.grid_size()) * alphabet.bits_per_symbol;
        for (double ebn0 : cfg.ebn0_db) {
            const NoiseSpec noise = NoiseSpec::from_ebn0(ebn0, alphabet.bits_per_symbol);
            struct Errors {
                long exact = 0, ignore = 0, approx = 0;
            };
            std::vector<Errors> errs(cfg.trials);
            parallel_for(cfg.trials, cfg.workers, [&](long trial) {
                const uint64_t seed = mix_seed(cfg.base_seed, point, trial);
                const ChannelRealization ch = draw_channel(params, cfg.num_paths, v,
                                                           mix_seed(seed, 1), DopplerGrid::Cosine);
                const TFGrid H_exact = tf_coeff_grid(ch, channel_model);
                const TFGrid H_ignore = tf_coeff_grid(ch, CoeffModel::IgnoreDse);
                const TFGrid H_approx = tf_coeff_grid(ch, CoeffModel::IdealApprox);
                for (int frame = 0; frame < cfg.data_frames; ++frame) {
                    Rng bit_rng(mix_seed(seed, 2, frame));
                    const std::vector<uint8_t> bits = random_bits(bit_rng, frame_bits);
                    const DDGrid x = map_bits(bits, alphabet, params);
                    const TFGrid Y0 = multiply(H_exact, isfft(x, params));
                    const TFGrid Y = add_noise(Y0, noise, mix_seed(seed, 3, frame));
                    auto count_errors = [&](const TFGrid& csi) {
                        const TFGrid Xh = lmmse_equalize(Y, csi, noise, 1.0);
                        const std::vector<uint8_t> hat = demap_symbols(sfft(Xh, params), alphabet);
                        long e = 0;
                        for (size_t i = 0; i < bits.size(); ++i)
                            if (hat[i] != bits[i]) ++e;
                        return e;
                    };
                    errs[trial].exact += count_errors(H_exact);
                    errs[trial].ignore += count_errors(H_ignore);
                    errs[trial].approx += count_errors(H_approx);
                }
            });
            long e_exact = 0, e_ignore = 0, e_approx = 0;
            for (const Errors& e : errs) {
                e_exact += e.exact;
                e_ignore += e.ignore;
                e_approx += e.approx;
            }
            const double bits_total =
                static_cast<double>(frame_bits) * cfg.trials * cfg.data_frames;
            const std::string tag = speed_tag(v_kmh);
            table.add(ebn0, "ber_csi_exact_" + tag, e_exact / bits_total, cfg.trials,
                      cfg.base_seed, point);
            table.add(ebn0, "ber_csi_ignore_" + tag, e_ignore / bits_total, cfg.trials,
                      cfg.base_seed, point);
            table.add(ebn0, "ber_csi_approx_" + tag, e_approx / bits_total, cfg.trials,
                      cfg.base_seed, point);
            table.add(ebn0, "bits_" + tag, bits_total, cfg.trials, cfg.base_seed, point);
            ++point;
        }
    }
    echo_config(table, cfg);
    table.note("wall_seconds", fmt(clock.seconds()));
    return table;
}

namespace {

struct EstimatorOutputs {
    double nmse_omp = 0;
    double nmse_threshold = 0;
};

// One pilot-frame estimation trial: exact-DSE channel, AWGN at the pilot
// SNR, OMP on the TF dictionary and the 3-sigma baseline in DD.
EstimatorOutputs estimation_trial(const OtfsParams& params, const SensingMatrix& phi,
                                  const ExperimentConfig& cfg, double v_mps,
                                  double snr_p_db, uint64_t seed) {
    const ChannelRealization ch = draw_channel(params, cfg.num_paths, v_mps, mix_seed(seed, 1));
    const TFGrid H_true = tf_coeff_grid(ch, CoeffModel::IdealExact);
    const PilotConfig pilot = PilotConfig::from_snr(snr_p_db);
    const NoiseSpec noise{pilot.sigma2()};
    const TFGrid Y = add_noise(
        multiply(H_true, isfft(build_pilot(pilot, params), params)), noise, mix_seed(seed, 2));

    const double c_tf = std::abs(pilot.x_p) * phi.scale_factor();
    const CVec y = vec_tf(Y) / c_tf;
    const EstimationResult est = omp_estimate(y, phi, {cfg.num_paths, 0.0});

    EstimatorOutputs out;
    out.nmse_omp = nmse(vec_tf(H_true), est.h_hat);
    const DDGrid y_dd = sfft(Y, params);
    const DDGrid h_thr = threshold_estimate(y_dd, std::sqrt(noise.sigma2), pilot);
    const DDGrid h_true_dd = dd_kernel_from_tf_diag(H_true, params);
    out.nmse_threshold = grid_nmse(h_true_dd, h_thr);
    return out;
}

} // namespace

ResultTable run_est_nmse_snr(const ExperimentConfig& cfg) {
    Stopwatch clock;
    ResultTable table;
    long point = 0;
    for (double v_kmh : cfg.speeds_kmh) {
        const OtfsParams params = cfg.params_for(cfg.num_subcarriers, v_kmh);
        const double v = cfg.speed_mps(v_kmh);
        const int k_span = static_cast<int>(std::ceil(doppler_bounds(v, params).k_max));
        const SensingMatrix phi = build_sensing_tf(params, k_span, cfg.l_max);
        for (double snr_p : cfg.snr_p_db) {
            std::vector<EstimatorOutputs> res(cfg.trials);
            parallel_for(cfg.trials, cfg.workers, [&](long trial) {
                res[trial] = estimation_trial(params, phi, cfg, v, snr_p,
                                              mix_seed(cfg.base_seed, point, trial));
            });
            double omp_mean = 0, thr_mean = 0;
            for (const EstimatorOutputs& r : res) {
                omp_mean += r.nmse_omp;
                thr_mean += r.nmse_threshold;
            }
            table.add(snr_p, "nmse_omp_" + speed_tag(v_kmh), omp_mean / cfg.trials, cfg.trials,
                      cfg.base_seed, point);
            table.add(snr_p, "nmse_threshold_" + speed_tag(v_kmh), thr_mean / cfg.trials,
                      cfg.trials, cfg.base_seed, point);
            ++point;
        }
    }
    echo_config(table, cfg);
    table.note("wall_seconds", fmt(clock.seconds()));
    return table;
}

ResultTable run_est_nmse_m(const ExperimentConfig& cfg) {
    Stopwatch clock;
    ResultTable table;
    long point = 0;
    for (int M : cfg.m_sweep) {
        for (double v_kmh : cfg.speeds_kmh) {
            const OtfsParams params = cfg.params_for(M, v_kmh);
            const double v = cfg.speed_mps(v_kmh);
            const int k_span = static_cast<int>(std::ceil(doppler_bounds(v, params).k_max));
            const SensingMatrix phi = build_sensing_tf(params, k_span, cfg.l_max);
            std::vector<EstimatorOutputs> res(cfg.trials);
            parallel_for(cfg.trials, cfg.workers, [&](long trial) {
                res[trial] = estimation_trial(params, phi, cfg, v, cfg.pilot_snr_db,
                                              mix_seed(cfg.base_seed, point, trial));
            });
            double omp_mean = 0, thr_mean = 0;
            for (const EstimatorOutputs& r : res) {
                omp_mean += r.nmse_omp;
                thr_mean += r.nmse_threshold;
            }
            table.add(M, "nmse_omp_" + speed_tag(v_kmh), omp_mean / cfg.trials, cfg.trials,
                      cfg.base_seed, point);
            table.add(M, "nmse_threshold_" + speed_tag(v_kmh), thr_mean / cfg.trials, cfg.trials,
                      cfg.base_seed, point);
            ++point;
        }
    }
    echo_config(table, cfg);
    table.note("wall_seconds", fmt(clock.seconds()));
    return table;
}

ResultTable run_est_ber(const ExperimentConfig& cfg) {
    Stopwatch clock;
    ResultTable table;
    const ModAlphabet& alphabet = ModAlphabet::from_name(cfg.alphabet);
    long point = 0;
    for (double v_kmh : cfg.speeds_kmh) {
        const OtfsParams params = cfg.params_for(cfg.num_subcarriers, v_kmh);
        const double v = cfg.speed_mps(v_kmh);
        const int k_span = static_cast<int>(std::ceil(doppler_bounds(v, params).k_max));
        const SensingMatrix phi = build_sensing_tf(params, k_span, cfg.l_max);
        const size_t frame_bits = static_cast<size_t>(params.grid_size()) * alphabet.bits_per_symbol;
        for (double ebn0 : cfg.ebn0_db) {
            const NoiseSpec data_noise = NoiseSpec::from_ebn0(ebn0, alphabet.bits_per_symbol);
            struct Errors {
                long omp = 0, threshold = 0, perfect = 0;
            };
            std::vector<Errors> errs(cfg.trials);
            parallel_for(cfg.trials, cfg.workers, [&](long trial) {
                const uint64_t seed = mix_seed(cfg.base_seed, point, trial);
                const ChannelRealization ch =
                    draw_channel(params, cfg.num_paths, v, mix_seed(seed, 1));
                const TFGrid H_true = tf_coeff_grid(ch, CoeffModel::IdealExact);

                // pilot frame, block fading: the same realization carries the
                // data frames below
                const PilotConfig pilot = PilotConfig::from_snr(cfg.pilot_snr_db);
                const NoiseSpec pilot_noise{pilot.sigma2()};
                const TFGrid Yp =
                    add_noise(multiply(H_true, isfft(build_pilot(pilot, params), params)),
                              pilot_noise, mix_seed(seed, 2));
                const double c_tf = std::abs(pilot.x_p) * phi.scale_factor();
                const EstimationResult est = omp_estimate(vec_tf(Yp) / c_tf, phi,
                                                          {cfg.num_paths, 0.0});
                const TFGrid H_omp =
                    tf_csi_from_taps(params, taps_from_estimate(phi, est), true);
                const DDGrid h_thr = threshold_estimate(sfft(Yp, params),
                                                        std::sqrt(pilot_noise.sigma2), pilot);
                // squint-free tap rebuild == inverse kernel transform
                const TFGrid H_thr = tf_diag_from_dd_kernel(h_thr, params);

                for (int frame = 0; frame < cfg.data_frames; ++frame) {
                    Rng bit_rng(mix_seed(seed, 3, frame));
                    const std::vector<uint8_t> bits = random_bits(bit_rng, frame_bits);
                    const DDGrid x = map_bits(bits, alphabet, params);
                    const TFGrid Y = add_noise(multiply(H_true, isfft(x, params)), data_noise,
                                               mix_seed(seed, 4, frame));
                    auto count_errors = [&](const TFGrid& csi) {
                        const TFGrid Xh = lmmse_equalize(Y, csi, data_noise, 1.0);
                        const std::vector<uint8_t> hat = demap_symbols(sfft(Xh, params), alphabet);
                        long e = 0;
                        for (size_t i = 0; i < bits.size(); ++i)
                            if (hat[i] != bits[i]) ++e;
                        return e;
                    };
                    errs[trial].omp += count_errors(H_omp);
                    errs[trial].threshold += count_errors(H_thr);
                    errs[trial].perfect += count_errors(H_true);
                }
            });
            long e_omp = 0, e_thr = 0, e_perfect = 0;
            for (const Errors& e : errs) {
                e_omp += e.omp;
                e_thr += e.threshold;
                e_perfect += e.perfect;
            }
            const double bits_total =
                static_cast<double>(frame_bits) * cfg.trials * cfg.data_frames;
            const std::string tag = speed_tag(v_kmh);
            table.add(ebn0, "ber_omp_csi_" + tag, e_omp / bits_total, cfg.trials, cfg.base_seed,
                      point);
            table.add(ebn0, "ber_threshold_csi_" + tag, e_thr / bits_total, cfg.trials,
                      cfg.base_seed, point);
            table.add(ebn0, "ber_perfect_csi_" + tag, e_perfect / bits_total, cfg.trials,
                      cfg.base_seed, point);
            table.add(ebn0, "bits_" + tag, bits_total, cfg.trials, cfg.base_seed, point);
            ++point;
        }
    }
    echo_config(table, cfg);
    table.note("wall_seconds", fmt(clock.seconds()));
    return table;
}

} // namespace otfs
