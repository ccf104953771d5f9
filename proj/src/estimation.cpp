#include "otfs/estimation.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

#include "otfs/transforms.hpp"

namespace otfs {
namespace {

cd polar1(double phase) { return cd(std::cos(phase), std::sin(phase)); }

double dse_rate(const OtfsParams& p, double k) {
    // phase slope of e^{j2pi mn k df/(N f_c)}
    return k * p.subcarrier_spacing / (p.num_slots * p.carrier_freq);
}

} // namespace

CVec vec_tf(const TFGrid& g) {
    CVec v(static_cast<long>(g.n_rows) * g.n_cols);
    for (int m = 0; m < g.n_cols; ++m)
        for (int n = 0; n < g.n_rows; ++n) v(n + static_cast<long>(m) * g.n_rows) = g.at(n, m);
    return v;
}

CVec vec_dd(const DDGrid& g) {
    CVec v(static_cast<long>(g.n_rows) * g.n_cols);
    for (int l = 0; l < g.n_cols; ++l)
        for (int k = 0; k < g.n_rows; ++k) v(k + static_cast<long>(l) * g.n_rows) = g.at(k, l);
    return v;
}

TFGrid grid_tf(const CVec& v, const OtfsParams& p) {
    TFGrid g(p.num_slots, p.num_subcarriers);
    for (int m = 0; m < g.n_cols; ++m)
        for (int n = 0; n < g.n_rows; ++n) g.at(n, m) = v(n + static_cast<long>(m) * g.n_rows);
    return g;
}

DDGrid grid_dd(const CVec& v, const OtfsParams& p) {
    DDGrid g(p.num_slots, p.num_subcarriers);
    for (int l = 0; l < g.n_cols; ++l)
        for (int k = 0; k < g.n_rows; ++k) g.at(k, l) = v(k + static_cast<long>(l) * g.n_rows);
    return g;
}

double PilotConfig::sigma2() const {
    return std::norm(x_p) / std::pow(10.0, snr_p_db / 10.0);
}

PilotConfig PilotConfig::from_snr(double snr_p_db, double sigma2) {
    PilotConfig pc;
    pc.snr_p_db = snr_p_db;
    pc.x_p = std::sqrt(sigma2 * std::pow(10.0, snr_p_db / 10.0));
    return pc;
}

DDGrid build_pilot(const PilotConfig& pc, const OtfsParams& p) {
    DDGrid x(p.num_slots, p.num_subcarriers);
    x.at(0, 0) = pc.x_p;
    return x;
}

std::pair<double, int> SensingMatrix::col_kl(int col) const {
    const int per_l = 2 * k_span + 1;
    const int l = col / per_l;
    const int k = col % per_l - k_span;
    return {static_cast<double>(k), l};
}

int SensingMatrix::col_index(int k, int l) const {
    if (k < -k_span || k > k_span || l < 0 || l > l_span)
        throw std::out_of_range("SensingMatrix::col_index: (k,l) outside dictionary");
    return l * (2 * k_span + 1) + (k + k_span);
}

double SensingMatrix::scale_factor() const {
    return domain == SensingDomain::TimeFrequency
               ? 1.0 / std::sqrt(static_cast<double>(params.grid_size()))
               : 1.0;
}

cd SensingMatrix::entry(long row, int col) const {
    if (dense_) return (*dense_)(row, col);
    const auto [k, l] = col_kl(col);
    const int N = params.num_slots;
    return sensing_basis_tf(params, k, l, static_cast<int>(row % N), static_cast<int>(row / N));
}

CVec SensingMatrix::column(int col) const {
    if (dense_) return dense_->col(col);
    const auto [k, l] = col_kl(col);
    return vec_tf(tf_basis_grid_at(params, k, l));
}

CVec SensingMatrix::correlate(const CVec& r) const {
    if (r.size() != num_rows())
        throw std::invalid_argument("SensingMatrix::correlate: residual length mismatch");
    if (dense_) return dense_->adjoint() * r;
    // structured TF path: for each dictionary k collapse the time axis,
    // then read the delay bins off an M-point sum
    const int N = params.num_slots, M = params.num_subcarriers;
    CVec psi(num_cols());
    std::vector<cd> g(M);
    for (int k = -k_span; k <= k_span; ++k) {
        const double inv_p = dse_rate(params, k);
        for (int m = 0; m < M; ++m) {
            cd acc = 0;
            for (int n = 0; n < N; ++n) {
                const double phase =
                    -2.0 * M_PI * (static_cast<double>(k) * n / N + static_cast<double>(m) * n * inv_p);
                acc += polar1(phase) * r(n + static_cast<long>(m) * N);
            }
            g[m] = acc;
        }
        for (int l = 0; l <= l_span; ++l) {
            cd acc = 0;
            for (int m = 0; m < M; ++m)
                acc += polar1(2.0 * M_PI * static_cast<double>(m) * l / M) * g[m];
            psi(col_index(k, l)) = acc;
        }
    }
    return psi;
}

const CMat& SensingMatrix::dense() const {
    if (!dense_) throw std::logic_error("SensingMatrix::dense: matrix not materialized");
    return *dense_;
}

void SensingMatrix::materialize() {
    if (dense_) return;
    CMat m(num_rows(), num_cols());
    for (int c = 0; c < num_cols(); ++c) m.col(c) = column(c);
    dense_ = std::move(m);
}

cd SensingMatrix::physical_gain(int col, cd beta_dict) const {
    const auto [k, l] = col_kl(col);
    const double phase = -2.0 * M_PI * k * l / static_cast<double>(params.grid_size());
    return beta_dict * polar1(phase);
}

void SensingMatrix::write_csv(std::ostream& os) const {
    os << "# domain," << (domain == SensingDomain::TimeFrequency ? "tf" : "dd") << "\n";
    os << "# col,k,l\n";
    for (int c = 0; c < num_cols(); ++c) {
        const auto [k, l] = col_kl(c);
        os << "# " << c << "," << k << "," << l << "\n";
    }
    os << "row";
    for (int c = 0; c < num_cols(); ++c) os << ",re" << c << ",im" << c;
    os << "\n";
    for (long r = 0; r < num_rows(); ++r) {
        os << r;
        for (int c = 0; c < num_cols(); ++c) {
            const cd z = entry(r, c);
            os << "," << z.real() << "," << z.imag();
        }
        os << "\n";
    }
}

SensingMatrix build_sensing_tf(const OtfsParams& p, int k_span, int l_span,
                               TfStorage storage) {
    if (k_span < 0 || l_span < 0 || l_span > p.num_subcarriers - 1)
        throw std::invalid_argument("build_sensing_tf: dictionary bounds out of range");
    SensingMatrix phi;
    phi.domain = SensingDomain::TimeFrequency;
    phi.params = p;
    phi.k_span = k_span;
    phi.l_span = l_span;
    // small dictionaries go dense (fast GEMV); large ones stay structured
    const bool dense = storage == TfStorage::Dense ||
                       (storage == TfStorage::Auto &&
                        phi.num_rows() * phi.num_cols() <= 4'000'000L);
    if (dense) phi.materialize();
    return phi;
}

SensingMatrix build_sensing_dd(const OtfsParams& p, int k_span, int l_span, CoeffModel model) {
    if (model != CoeffModel::DdClosed && model != CoeffModel::IdealApprox &&
        model != CoeffModel::Rect)
        throw std::invalid_argument("build_sensing_dd: model must be dd-closed, ideal-approx "
                                    "(SFFT image) or rect");
    SensingMatrix phi;
    phi.domain = SensingDomain::DelayDoppler;
    phi.params = p;
    phi.k_span = k_span;
    phi.l_span = l_span;
    CMat m(phi.num_rows(), phi.num_cols());
    for (int c = 0; c < phi.num_cols(); ++c) {
        const auto [k, l] = phi.col_kl(c);
        DDGrid col;
        switch (model) {
            case CoeffModel::DdClosed:
                col = dd_kernel_ideal_grid_at(p, k, static_cast<int>(l));
                break;
            case CoeffModel::IdealApprox:
                col = dd_kernel_from_tf_diag(tf_basis_grid_at(p, k, static_cast<int>(l)), p);
                break;
            default:
                col = dd_rect_pilot_grid_at(p, k, static_cast<int>(l));
                break;
        }
        m.col(c) = vec_dd(col);
    }
    phi.dense_ = std::move(m);
    return phi;
}

EstimationResult omp_estimate(const CVec& y, const SensingMatrix& Phi, const OmpStop& stop) {
    if (y.size() != Phi.num_rows())
        throw std::invalid_argument("omp_estimate: measurement length must be NM");
    EstimationResult est;
    CVec r = y;
    CMat basis(Phi.num_rows(), std::max(stop.max_iter, 1));
    CVec beta;
    while (est.iterations < stop.max_iter) {
        const double r_norm = r.norm();
        if (r_norm == 0.0 || r_norm < stop.eps) break;
        const CVec psi = Phi.correlate(r);
        int pick = 0;
        double best = -1.0;
        for (int q = 0; q < psi.size(); ++q) {
            const double mag = std::abs(psi(q));
            if (mag > best) { // strict: ties keep the lowest column index
                best = mag;
                pick = q;
            }
        }
        bool duplicate = false;
        for (int s : est.support) duplicate |= (s == pick);
        if (duplicate) { // residual numerically orthogonal to the span
            est.degenerate = true;
            break;
        }
        basis.col(est.iterations) = Phi.column(pick);
        const int t = est.iterations + 1;
        Eigen::ColPivHouseholderQR<CMat> qr(basis.leftCols(t));
        qr.setThreshold(1e-12);
        if (qr.rank() < t) { // drop the newly added column and stop
            est.degenerate = true;
            break;
        }
        est.support.push_back(pick);
        beta = qr.solve(y);
        r = y - basis.leftCols(t) * beta;
        est.residual_norms.push_back(r.norm());
        est.iterations = t;
    }
    est.beta_hat = beta;
    est.beta_physical = beta;
    est.h_hat = CVec::Zero(Phi.num_rows());
    for (int j = 0; j < est.iterations; ++j) {
        est.h_hat += basis.col(j) * beta(j);
        est.beta_physical(j) = Phi.physical_gain(est.support[j], beta(j));
    }
    return est;
}

DDGrid threshold_estimate(const DDGrid& y_dd, double sigma, const PilotConfig& pc) {
    DDGrid h(y_dd.n_rows, y_dd.n_cols);
    const double gate = 3.0 * sigma;
    for (size_t i = 0; i < y_dd.size(); ++i)
        if (std::abs(y_dd.v[i]) > gate) h.v[i] = y_dd.v[i] / pc.x_p;
    return h;
}

double nmse(const CVec& h, const CVec& h_hat) {
    if (h.size() != h_hat.size())
        throw std::invalid_argument("nmse: vectors must have equal length");
    const double den = h.squaredNorm();
    if (den == 0.0) throw std::domain_error("nmse: reference channel has zero norm");
    return (h - h_hat).squaredNorm() / den;
}

TFGrid tf_csi_from_taps(const OtfsParams& p, const std::vector<ChannelTap>& taps,
                        bool include_dse) {
    TFGrid H(p.num_slots, p.num_subcarriers);
    for (const ChannelTap& tap : taps) {
        const double inv_p = dse_rate(p, tap.k);
        for (int n = 0; n < p.num_slots; ++n)
            for (int m = 0; m < p.num_subcarriers; ++m) {
                double phase = 2.0 * M_PI * (tap.k * n / p.num_slots -
                                             static_cast<double>(tap.l) * m / p.num_subcarriers);
                if (include_dse) phase += 2.0 * M_PI * static_cast<double>(m) * n * inv_p;
                H.at(n, m) += tap.gain * polar1(phase);
            }
    }
    return H;
}

std::vector<ChannelTap> taps_from_estimate(const SensingMatrix& Phi, const EstimationResult& est) {
    std::vector<ChannelTap> taps;
    taps.reserve(est.support.size());
    for (size_t j = 0; j < est.support.size(); ++j) {
        const auto [k, l] = Phi.col_kl(est.support[j]);
        taps.push_back({k, static_cast<int>(l), est.beta_hat(static_cast<long>(j))});
    }
    return taps;
}

std::vector<ChannelTap> taps_from_grid(const DDGrid& h) {
    std::vector<ChannelTap> taps;
    for (int k = 0; k < h.n_rows; ++k)
        for (int l = 0; l < h.n_cols; ++l)
            if (h.at(k, l) != cd(0, 0))
                taps.push_back({static_cast<double>(k), l, h.at(k, l)});
    return taps;
}

} // namespace otfs
