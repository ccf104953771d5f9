#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "otfs/io_analysis.hpp"
#include "otfs/params.hpp"

namespace otfs {

// Table-style configuration shared by all scenario runners. Field names
// mirror the key=value config file keys.
struct ExperimentConfig {
    double carrier_frequency_hz = 4e9;
    double subcarrier_spacing_hz = 15e3;
    int num_subcarriers = 512;
    int num_slots = 128;
    std::vector<double> speeds_kmh = {100, 360, 500};
    std::string alphabet = "16QAM";
    int l_max = 20;
    int num_paths = 4;

    std::vector<int> m_sweep = {128, 256, 512, 1024, 2048};
    std::vector<double> snr_p_db = {20, 25, 30, 35, 40, 45, 50};
    std::vector<double> ebn0_db = {10, 15, 20, 25, 30};
    double pilot_snr_db = 45.0;
    int trials = 100;
    int data_frames = 1;
    uint64_t base_seed = 1;
    std::string model = "ideal-exact";
    int workers = 0; // 0 = hardware concurrency
    int osf = 4;
    std::string scenario;
    std::string out_path;

    // grid parameters for one sweep point; the Doppler cap follows the
    // speed (with a floor keeping k_max legal for static scenarios)
    OtfsParams params_for(int M, double speed_kmh) const;
    double speed_mps(double speed_kmh) const { return speed_kmh / 3.6; }
};

ExperimentConfig load_config(const std::string& path);
void apply_config_line(ExperimentConfig& cfg, const std::string& key, const std::string& value);

struct ResultRow {
    double sweep_value = 0;
    std::string metric;
    double mean = 0;
    long trial_count = 0;
    uint64_t base_seed = 0;
    long point_index = 0; // per-trial seed = mix_seed(base_seed, point_index, trial)
};

struct ResultTable {
    std::vector<ResultRow> rows;
    std::vector<std::pair<std::string, std::string>> metadata;
    bool all_pass = true; // meaningful for the validate scenario

    void add(double sweep, const std::string& metric, double mean, long trials,
             uint64_t seed, long point);
    void note(const std::string& key, const std::string& value);
    double value_of(const std::string& metric, double sweep) const;
    void write_csv(std::ostream& os) const;
    void save(const std::string& out_path) const; // CSV plus .meta.txt sidecar
};

int resolve_workers(int requested);

// Deterministic parallel map: fn(i) for i in [0, count) on a small pool;
// callers collect results indexed by i so the reduction order is fixed.
void parallel_for(long count, int workers, const std::function<void(long)>& fn);

ResultTable run_sig_nmse(const ExperimentConfig& cfg);
ResultTable run_sig_ber(const ExperimentConfig& cfg);
ResultTable run_est_nmse_snr(const ExperimentConfig& cfg);
ResultTable run_est_nmse_m(const ExperimentConfig& cfg);
ResultTable run_est_ber(const ExperimentConfig& cfg);

struct ValidateOptions {
    bool corrupt_rect_kernel = false; // negative control for suite (c)
};

ResultTable run_validate(const ExperimentConfig& cfg, const ValidateOptions& opts = {});

} // namespace otfs
