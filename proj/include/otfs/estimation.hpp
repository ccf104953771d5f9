#pragma once

#include <Eigen/Dense>

#include <iosfwd>
#include <optional>
#include <utility>
#include <vector>

#include "otfs/channel.hpp"
#include "otfs/grid.hpp"
#include "otfs/io_analysis.hpp"
#include "otfs/params.hpp"

namespace otfs {

using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;

// Vectorization conventions shared by the sensing machinery: the TF grid
// stacks as row index n + m N, the DD grid as k + l N.
CVec vec_tf(const TFGrid& g);
CVec vec_dd(const DDGrid& g);
TFGrid grid_tf(const CVec& v, const OtfsParams& p);
DDGrid grid_dd(const CVec& v, const OtfsParams& p);

struct PilotConfig {
    cd x_p = 1.0;          // pilot amplitude
    double snr_p_db = 0;   // |x_p|^2 / sigma^2, dB

    double sigma2() const;
    static PilotConfig from_snr(double snr_p_db, double sigma2 = 1.0);
};

// x[0,0] = x_p, everything else zero: the whole frame is pilot.
DDGrid build_pilot(const PilotConfig& pc, const OtfsParams& p);

enum class SensingDomain { TimeFrequency, DelayDoppler };
enum class TfStorage { Auto, Dense, Structured };

// NM x D dictionary over the (k, l) grid with k in [-k_span, k_span] and
// l in [0, l_span]. The TF variant is generated from its closed form on
// demand (and only materialized when small); DD variants are dense.
// Column gains live in the beta[k,l] = beta_{k,l} e^{j2pi kl/(NM)}
// convention; scale_factor() gives c_alpha/x_p for the domain.
class SensingMatrix {
  public:
    SensingDomain domain = SensingDomain::TimeFrequency;
    OtfsParams params;
    int k_span = 0;
    int l_span = 0;

    long num_rows() const { return params.grid_size(); }
    int num_cols() const { return (2 * k_span + 1) * (l_span + 1); }
    std::pair<double, int> col_kl(int col) const; // (k, l)
    int col_index(int k, int l) const;
    double scale_factor() const; // 1/sqrt(NM) for TF, 1 for DD

    CVec column(int col) const;
    CVec correlate(const CVec& r) const; // Phi^H r
    cd entry(long row, int col) const;

    bool materialized() const { return dense_.has_value(); }
    const CMat& dense() const;
    void materialize();

    // physical beta_{k,l} from a recovered beta[k,l] gain
    cd physical_gain(int col, cd beta_dict) const;

    void write_csv(std::ostream& os) const;

  private:
    friend SensingMatrix build_sensing_tf(const OtfsParams&, int, int, TfStorage);
    friend SensingMatrix build_sensing_dd(const OtfsParams&, int, int, CoeffModel);
    std::optional<CMat> dense_;
};

SensingMatrix build_sensing_tf(const OtfsParams& p, int k_span, int l_span,
                               TfStorage storage = TfStorage::Auto);

// model selects the column generator: DdClosed (ideal-pulse closed form),
// IdealApprox (exact SFFT image of the phase-offset TF column), or Rect
// (rectangular-pulse pilot response).
SensingMatrix build_sensing_dd(const OtfsParams& p, int k_span, int l_span, CoeffModel model);

struct OmpStop {
    int max_iter = 4;
    double eps = 0;
};

struct EstimationResult {
    std::vector<int> support;          // selected columns, in pick order
    CVec beta_hat;                     // gains on support, beta[k,l] convention
    CVec beta_physical;                // gains converted to physical beta_{k,l}
    CVec h_hat;                        // Phi * beta, length NM
    std::vector<double> residual_norms;
    int iterations = 0;
    bool degenerate = false;
};

// Orthogonal matching pursuit per the estimation algorithm: correlate,
// pick the max-|correlation| column (ties to the lowest index), least
// squares via Householder QR, update the residual. y must already be
// scaled by 1/c_alpha.
EstimationResult omp_estimate(const CVec& y, const SensingMatrix& Phi, const OmpStop& stop);

// Classical impulse-model baseline: every DD sample above 3 sigma becomes
// a tap y[k,l]/x_p; everything else is zeroed.
DDGrid threshold_estimate(const DDGrid& y_dd, double sigma, const PilotConfig& pc);

// ||h - h_hat||^2 / ||h||^2
double nmse(const CVec& h, const CVec& h_hat);

struct ChannelTap {
    double k = 0; // signed Doppler index
    int l = 0;
    cd gain;      // beta[k,l] convention
};

// TF CSI rebuild from recovered taps; include_dse adds the
// squint phase e^{j2pi mnk df/(N f_c)}.
TFGrid tf_csi_from_taps(const OtfsParams& p, const std::vector<ChannelTap>& taps,
                        bool include_dse);

// taps of an OMP result / a thresholded DD grid
std::vector<ChannelTap> taps_from_estimate(const SensingMatrix& Phi, const EstimationResult& est);
std::vector<ChannelTap> taps_from_grid(const DDGrid& h);

} // namespace otfs
