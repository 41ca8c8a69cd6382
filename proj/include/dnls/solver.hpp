#pragma once

// Pseudo-spectral integration of  L_{m_j} u_j = F_j(u, u_x)  on a periodic
// box, plus the free-flow, scaled-Fourier and Galilean-type operators the
// asymptotic analysis is built from.

#include <span>
#include <string>
#include <vector>

#include "dnls/grid.hpp"
#include "dnls/model.hpp"

namespace dnls {

struct FieldState {
    double t = 0.0;
    Grid1D grid;
    std::vector<std::vector<cplx>> values;  // N x Nx

    int n_components() const { return static_cast<int>(values.size()); }
};

struct InitialData {
    enum class Kind { Gaussian, ModulatedGaussian, File };
    Kind kind = Kind::Gaussian;
    double sigma = 1.0;
    double velocity = 0.0;            // modulation e^{i v x}
    std::vector<cplx> amplitudes;     // per-component factor on eps
    std::string path;                 // snapshot file for Kind::File
};

struct SolverConfig {
    double dt = 1e-2;
    double t_end = 1.0;
    bool dealias = true;
    double eps = 0.1;  // amplitude of the initial data
    std::vector<double> sample_times;
    std::vector<double> snapshot_times;
    bool record_j = false;
    double blowup_ceiling = 1e6;  // on the L-inf norm
};

struct Observables {
    double t = 0.0;
    std::vector<double> l2;
    std::vector<double> linf;
    std::vector<double> w1inf;
    std::vector<double> j_l2;  // empty unless record_j
};

struct Trajectory {
    std::vector<Observables> samples;
    std::vector<FieldState> snapshots;
    bool completed = true;
    double blowup_time = -1.0;  // last good time when !completed
};

// --- linear flow ------------------------------------------------------

// Multiplies each mode k of component j by exp(-i k^2 dt / (2 m_j)).
FieldState free_propagate(const FieldState& state, double dt,
                          const MassVector& masses);

// --- nonlinear term ---------------------------------------------------

// Spectral right side -i F_hat_j, with u_x computed spectrally and the
// 2/3 rule applied to the product inputs and the output when dealias is on.
std::vector<std::vector<cplx>> nonlinear_rhs(const CubicSystem& sys,
                                             const FieldState& state,
                                             bool dealias = true);

// One integrating-factor RK4 step; the linear factor is exact, so with
// F == 0 this is the same code path as free_propagate.
FieldState step_ifrk4(const CubicSystem& sys, const FieldState& state,
                      double dt, bool dealias = true);

Trajectory run(const CubicSystem& sys, const SolverConfig& config,
               const FieldState& initial);

// --- operators of the asymptotic machinery ----------------------------

// (F_m phi)(xi) = |m|^{1/2} e^{-i pi sgn(m)/4} phi_hat(m xi), evaluated at
// arbitrary frequencies by direct semidiscrete summation.
std::vector<cplx> scaled_fourier(std::span<const cplx> phi, const Grid1D& grid,
                                 double m, std::span<const double> xi);

struct JResult {
    std::vector<cplx> values;
    bool boundary_warning = false;
};

// J_m u_j = (it/m) e^{imx^2/2t} d/dx (e^{-imx^2/2t} u_j); requires t > 0.
JResult apply_J(const FieldState& state, int component,
                const MassVector& masses);

// M_m D F_m U_m^{-1} u_j at the grid nodes (the stationary-phase
// approximation of u_j); requires t > 0.
std::vector<cplx> free_asymptotic_approx(const FieldState& state,
                                         int component,
                                         const MassVector& masses);

// --- helpers ----------------------------------------------------------

FieldState make_initial(const Grid1D& grid, int n_components, double eps,
                        const InitialData& data);

double l2_norm(const Grid1D& grid, std::span<const cplx> u);
double linf_norm(std::span<const cplx> u);
std::vector<cplx> spectral_derivative(const Grid1D& grid,
                                      std::span<const cplx> u);

Observables measure(const CubicSystem& sys, const FieldState& state,
                    bool record_j);

// Ratio of the largest amplitude in the outer 2% of the box to the global
// maximum; the analysis operators assume this is < 1e-8.
double boundary_amplitude_ratio(const Grid1D& grid, std::span<const cplx> u);

}  // namespace dnls
