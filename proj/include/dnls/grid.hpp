#pragma once

// Periodic grid and FFT plumbing shared by the solver and the analysis.

#include <complex>
#include <memory>
#include <vector>

namespace dnls {

using cplx = std::complex<double>;

struct Grid1D {
    double length = 0.0;
    int nx = 0;

    // nx must be a power of two >= 16.
    static Grid1D make(double length, int nx);

    double dx() const { return length / nx; }
    double node(int n) const { return -0.5 * length + n * dx(); }
    // FFT-ordered wavenumber 2*pi*s/L with signed index s.
    double wavenumber(int n) const;
    // Highest mode kept by the 2/3 rule.
    int dealias_cut() const { return nx / 3; }

    friend bool operator==(const Grid1D&, const Grid1D&) = default;
};

// Cached FFTW plans for one transform size. forward() is the unnormalized
// e^{-ikx} sum; backward() divides by nx so backward(forward(x)) == x.
class Fft {
public:
    explicit Fft(int n);
    ~Fft();
    Fft(const Fft&) = delete;
    Fft& operator=(const Fft&) = delete;

    int size() const { return n_; }
    void forward(const cplx* in, cplx* out) const;
    void backward(const cplx* in, cplx* out) const;

    std::vector<cplx> forward(const std::vector<cplx>& in) const;
    std::vector<cplx> backward(const std::vector<cplx>& in) const;

private:
    struct Impl;
    int n_;
    std::unique_ptr<Impl> impl_;
};

// Process-wide plan cache; plan creation is serialized internally.
const Fft& fft_for(int n);

}  // namespace dnls
