#include "otfs/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>
#include <vector>

namespace otfs::fft {
namespace {

// Plans are cached per geometry and reused via fftw_execute_dft, which is
// thread-safe; plan creation is not and is serialized here. Plans are made
// with FFTW_UNALIGNED so they apply to any caller buffer.
class PlanCache {
  public:
    fftw_plan get(int len, int howmany, int stride, int dist, int sign, size_t total) {
        std::lock_guard<std::mutex> lock(mu_);
        Key key{len, howmany, stride, dist, sign};
        auto it = plans_.find(key);
        if (it != plans_.end()) return it->second;
        std::vector<fftw_complex> scratch(total);
        int n[1] = {len};
        fftw_plan plan = fftw_plan_many_dft(1, n, howmany,
                                            scratch.data(), nullptr, stride, dist,
                                            scratch.data(), nullptr, stride, dist,
                                            sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
        plans_.emplace(key, plan);
        return plan;
    }

  private:
    using Key = std::tuple<int, int, int, int, int>;
    std::mutex mu_;
    std::map<Key, fftw_plan> plans_;
};

PlanCache& cache() {
    static PlanCache c;
    return c;
}

void execute(std::complex<double>* data, int len, int howmany, int stride, int dist, int sign) {
    const size_t total = static_cast<size_t>(len) * howmany;
    fftw_plan plan = cache().get(len, howmany, stride, dist, sign, total);
    auto* raw = reinterpret_cast<fftw_complex*>(data);
    fftw_execute_dft(plan, raw, raw);
}

} // namespace

void transform_rows(std::complex<double>* data, int n_rows, int n_cols, int sign) {
    execute(data, n_cols, n_rows, 1, n_cols, sign);
}

void transform_cols(std::complex<double>* data, int n_rows, int n_cols, int sign) {
    execute(data, n_rows, n_cols, n_cols, 1, sign);
}

} // namespace otfs::fft
