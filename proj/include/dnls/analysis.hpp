#pragma once

// Profile extraction, effective-equation residuals, the reduced per-frequency
// ODE, the Lyapunov quantity, decay-law fitting, the ODE comparison bound
// and the scattering (Cauchy) check.

#include <string>
#include <vector>

#include "dnls/solver.hpp"
#include "dnls/structure.hpp"

namespace dnls {

// alpha_j(t,xi) = F_{m_j}[ U_{m_j}(t)^{-1} u_j(t,.) ](xi) on a shared grid.
struct ProfileState {
    double t = 0.0;
    std::vector<double> xi_grid;
    std::vector<std::vector<cplx>> alpha;  // N x |xi|
    bool boundary_warning = false;

    int n_components() const { return static_cast<int>(alpha.size()); }
};

struct ResidualField {
    double t = 0.0;
    std::vector<double> xi_grid;
    std::vector<std::vector<cplx>> rho;  // N x |xi|

    double sup_abs() const;
};

enum class DecayModel { PurePower, PowerLog, LogOnly };

struct DecayFit {
    DecayModel model = DecayModel::PurePower;
    double slope = 0.0;            // LSQ slope of log(compensated) vs log t
    double constancy_ratio = 0.0;  // max/min of the compensated series
    double t0 = 0.0, t1 = 0.0;
    int n_samples = 0;
};

struct KmsInput {
    double c0 = 1.0;   // > 0
    double c1 = 0.0;   // >= 0
    double p = 2.0;    // > 1
    double q = 1.25;   // > 1
    double psi2 = 0.0; // Psi(2) >= 0
};

struct KmsReport {
    double pstar = 0.0;
    double c2 = 0.0;
    double min_margin = 0.0;  // min over samples of bound - Psi
    std::vector<double> t;
    std::vector<double> psi;
    std::vector<double> bound;

    bool passes() const { return min_margin >= 0.0; }
};

struct ScatteringReport {
    std::vector<double> t;
    std::vector<double> diff_linf;  // ||alpha(t) - alpha_plus|| on the grid
    std::vector<double> diff_l2;
    double fitted_exponent = 0.0;
    bool strictly_decreasing = false;
    bool pass = false;
};

std::vector<double> uniform_xi_grid(double xi_max, int points);

ProfileState extract_profile(const FieldState& state, const MassVector& masses,
                             const std::vector<double>& xi_grid);

// rho_j = F_{m_j} U_{m_j}^{-1}[F_j(u, u_x)] - p_j(xi; alpha)/t, evaluated
// from the right side directly (no time differencing).
ResidualField compute_residual(const CubicSystem& sys, const FieldState& state,
                               const ProfileState& profile);

// Per-xi RK4 integration of i d(alpha)/dt = p(xi; alpha)/t in s = log t.
ProfileState integrate_reduced(const CubicSystem& sys,
                               const ProfileState& initial, double t_end,
                               int steps);

// nu(xi) = sqrt(<alpha, A alpha>).
std::vector<double> lyapunov_nu(const ProfileState& profile,
                                const HermitianForm& A);

// Integrates the worst-case equality ODE Psi' = -C0 Psi^p / t + C1 / t^q
// from t = 2 and compares against C2 / (log t)^{p*-1}.
KmsReport kms_verify(const KmsInput& input, double t_max, int samples);

DecayFit fit_decay(const std::vector<std::pair<double, double>>& series,
                   DecayModel model, double eps, double t0, double t1);

// Cauchy property of alpha(t) toward the last snapshot; refuses to run
// unless the symbol vanishes identically (b3).
ScatteringReport scattering_check(const CubicSystem& sys,
                                  const std::vector<ProfileState>& profiles,
                                  double delta);

void write_profile_csv(const ProfileState& profile, const std::string& path);
ProfileState read_profile_csv(const std::string& path);

}  // namespace dnls
