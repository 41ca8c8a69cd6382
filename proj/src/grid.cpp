#include "dnls/grid.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstring>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace dnls {

Grid1D Grid1D::make(double length, int nx) {
    if (!(length > 0.0)) throw std::invalid_argument("grid length must be > 0");
    if (nx < 16 || (nx & (nx - 1)) != 0)
        throw std::invalid_argument("nx must be a power of two >= 16");
    return Grid1D{length, nx};
}

double Grid1D::wavenumber(int n) const {
    const int s = n <= nx / 2 ? n : n - nx;
    return 2.0 * std::numbers::pi * s / length;
}

struct Fft::Impl {
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;
    fftw_complex* buf_in = nullptr;
    fftw_complex* buf_out = nullptr;
    mutable std::mutex exec_mutex;  // plans share the staging buffers
};

namespace {
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace

Fft::Fft(int n) : n_(n), impl_(std::make_unique<Impl>()) {
    if (n < 1) throw std::invalid_argument("fft size must be >= 1");
    std::lock_guard<std::mutex> lock(planner_mutex());
    impl_->buf_in = fftw_alloc_complex(n);
    impl_->buf_out = fftw_alloc_complex(n);
    impl_->fwd = fftw_plan_dft_1d(n, impl_->buf_in, impl_->buf_out,
                                  FFTW_FORWARD, FFTW_ESTIMATE);
    impl_->bwd = fftw_plan_dft_1d(n, impl_->buf_in, impl_->buf_out,
                                  FFTW_BACKWARD, FFTW_ESTIMATE);
}

Fft::~Fft() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(impl_->fwd);
    fftw_destroy_plan(impl_->bwd);
    fftw_free(impl_->buf_in);
    fftw_free(impl_->buf_out);
}

void Fft::forward(const cplx* in, cplx* out) const {
    std::lock_guard<std::mutex> lock(impl_->exec_mutex);
    std::memcpy(impl_->buf_in, in, sizeof(cplx) * n_);
    fftw_execute(impl_->fwd);
    std::memcpy(out, impl_->buf_out, sizeof(cplx) * n_);
}

void Fft::backward(const cplx* in, cplx* out) const {
    std::lock_guard<std::mutex> lock(impl_->exec_mutex);
    std::memcpy(impl_->buf_in, in, sizeof(cplx) * n_);
    fftw_execute(impl_->bwd);
    const double inv = 1.0 / n_;
    for (int i = 0; i < n_; ++i)
        out[i] = cplx{impl_->buf_out[i][0] * inv, impl_->buf_out[i][1] * inv};
}

std::vector<cplx> Fft::forward(const std::vector<cplx>& in) const {
    std::vector<cplx> out(in.size());
    forward(in.data(), out.data());
    return out;
}

std::vector<cplx> Fft::backward(const std::vector<cplx>& in) const {
    std::vector<cplx> out(in.size());
    backward(in.data(), out.data());
    return out;
}

const Fft& fft_for(int n) {
    static std::mutex map_mutex;
    static std::map<int, std::unique_ptr<Fft>> cache;
    std::lock_guard<std::mutex> lock(map_mutex);
    auto it = cache.find(n);
    if (it == cache.end())
        it = cache.emplace(n, std::make_unique<Fft>(n)).first;
    return *it->second;
}

}  // namespace dnls
