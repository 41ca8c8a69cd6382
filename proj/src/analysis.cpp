#include "dnls/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>

#include "dnls/io.hpp"

namespace dnls {

double ResidualField::sup_abs() const {
    double sup = 0.0;
    for (const auto& comp : rho)
        for (const cplx& v : comp) sup = std::max(sup, std::abs(v));
    return sup;
}

std::vector<double> uniform_xi_grid(double xi_max, int points) {
    if (points < 2 || !(xi_max > 0.0))
        throw std::invalid_argument("bad xi grid request");
    std::vector<double> grid(points);
    for (int i = 0; i < points; ++i)
        grid[i] = -xi_max + 2.0 * xi_max * i / (points - 1);
    return grid;
}

namespace {

// U_m(t)^{-1} applied spectrally.
std::vector<cplx> undo_free_flow(const Grid1D& grid, double t, double m,
                                 const std::vector<cplx>& u) {
    const Fft& fft = fft_for(grid.nx);
    std::vector<cplx> hat = fft.forward(u);
    for (int i = 0; i < grid.nx; ++i) {
        const double k = grid.wavenumber(i);
        hat[i] *= std::polar(1.0, k * k * t / (2.0 * m));
    }
    return fft.backward(hat);
}

}  // namespace

ProfileState extract_profile(const FieldState& state, const MassVector& masses,
                             const std::vector<double>& xi_grid) {
    if (!(state.t >= 1.0))
        throw std::invalid_argument("extract_profile: requires t >= 1");
    ProfileState profile;
    profile.t = state.t;
    profile.xi_grid = xi_grid;
    profile.alpha.resize(state.n_components());
    for (int j = 0; j < state.n_components(); ++j) {
        if (boundary_amplitude_ratio(state.grid, state.values[j]) > 1e-8)
            profile.boundary_warning = true;
        const std::vector<cplx> w =
            undo_free_flow(state.grid, state.t, masses.m[j], state.values[j]);
        profile.alpha[j] = scaled_fourier(w, state.grid, masses.m[j], xi_grid);
    }
    return profile;
}

ResidualField compute_residual(const CubicSystem& sys, const FieldState& state,
                               const ProfileState& profile) {
    if (profile.t != state.t)
        throw std::invalid_argument("compute_residual: time mismatch");
    const int n = sys.n_components();
    const Grid1D& grid = state.grid;

    // F_j(u, u_x) in physical space
    std::vector<std::vector<cplx>> ux(n);
    for (int j = 0; j < n; ++j)
        ux[j] = spectral_derivative(grid, state.values[j]);
    std::vector<std::vector<cplx>> f(n, std::vector<cplx>(grid.nx, cplx{}));
    std::vector<cplx> u_pt(n), ux_pt(n);
    for (int i = 0; i < grid.nx; ++i) {
        for (int j = 0; j < n; ++j) {
            u_pt[j] = state.values[j][i];
            ux_pt[j] = ux[j][i];
        }
        const std::vector<cplx> f_pt = sys.evaluate_F(u_pt, ux_pt);
        for (int j = 0; j < n; ++j) f[j][i] = f_pt[j];
    }

    ResidualField res;
    res.t = state.t;
    res.xi_grid = profile.xi_grid;
    res.rho.resize(n);
    const std::size_t nxi = profile.xi_grid.size();
    std::vector<cplx> alpha_pt(n);
    for (int j = 0; j < n; ++j) {
        const std::vector<cplx> w =
            undo_free_flow(grid, state.t, sys.masses().m[j], f[j]);
        res.rho[j] =
            scaled_fourier(w, grid, sys.masses().m[j], profile.xi_grid);
    }
    for (std::size_t q = 0; q < nxi; ++q) {
        for (int j = 0; j < n; ++j) alpha_pt[j] = profile.alpha[j][q];
        const std::vector<cplx> p = sys.symbol_p(profile.xi_grid[q], alpha_pt);
        for (int j = 0; j < n; ++j) res.rho[j][q] -= p[j] / state.t;
    }
    return res;
}

ProfileState integrate_reduced(const CubicSystem& sys,
                               const ProfileState& initial, double t_end,
                               int steps) {
    if (!(initial.t >= 1.0))
        throw std::invalid_argument("integrate_reduced: requires t0 >= 1");
    if (!(t_end > initial.t) || steps < 1)
        throw std::invalid_argument("integrate_reduced: bad range");
    const int n = initial.n_components();
    const double s0 = std::log(initial.t);
    const double h = (std::log(t_end) - s0) / steps;
    const cplx minus_i{0.0, -1.0};

    ProfileState out = initial;
    out.t = t_end;
    const std::size_t nxi = initial.xi_grid.size();
    std::vector<cplx> a(n), k1(n), k2(n), k3(n), k4(n), tmp(n);
    for (std::size_t q = 0; q < nxi; ++q) {
        const double xi = initial.xi_grid[q];
        for (int j = 0; j < n; ++j) a[j] = initial.alpha[j][q];
        auto f = [&](const std::vector<cplx>& y, std::vector<cplx>& dy) {
            const std::vector<cplx> p = sys.symbol_p(xi, y);
            for (int j = 0; j < n; ++j) dy[j] = minus_i * p[j];
        };
        for (int s = 0; s < steps; ++s) {
            f(a, k1);
            for (int j = 0; j < n; ++j) tmp[j] = a[j] + 0.5 * h * k1[j];
            f(tmp, k2);
            for (int j = 0; j < n; ++j) tmp[j] = a[j] + 0.5 * h * k2[j];
            f(tmp, k3);
            for (int j = 0; j < n; ++j) tmp[j] = a[j] + h * k3[j];
            f(tmp, k4);
            for (int j = 0; j < n; ++j)
                a[j] += h / 6.0 * (k1[j] + 2.0 * (k2[j] + k3[j]) + k4[j]);
        }
        for (int j = 0; j < n; ++j) out.alpha[j][q] = a[j];
    }
    return out;
}

std::vector<double> lyapunov_nu(const ProfileState& profile,
                                const HermitianForm& A) {
    const int n = profile.n_components();
    if (A.size() != n)
        throw std::invalid_argument("lyapunov_nu: dimension mismatch");
    const std::size_t nxi = profile.xi_grid.size();
    std::vector<double> nu(nxi);
    Eigen::VectorXcd a(n);
    for (std::size_t q = 0; q < nxi; ++q) {
        for (int j = 0; j < n; ++j) a[j] = profile.alpha[j][q];
        const double v = std::real(a.dot(A.entries() * a));
        nu[q] = std::sqrt(std::max(0.0, v));
    }
    return nu;
}

namespace {

double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double tol, int depth = 0) {
    const double c = 0.5 * (a + b);
    const double fa = f(a), fb = f(b), fc = f(c);
    const double coarse = (b - a) / 6.0 * (fa + 4.0 * fc + fb);
    const double l = (c - a) / 6.0 * (fa + 4.0 * f(0.5 * (a + c)) + fc);
    const double r = (b - c) / 6.0 * (fc + 4.0 * f(0.5 * (c + b)) + fb);
    if (depth > 40 || std::abs(l + r - coarse) < 15.0 * tol)
        return l + r + (l + r - coarse) / 15.0;
    return adaptive_simpson(f, a, c, 0.5 * tol, depth + 1) +
           adaptive_simpson(f, c, b, 0.5 * tol, depth + 1);
}

}  // namespace

KmsReport kms_verify(const KmsInput& input, double t_max, int samples) {
    if (!(input.p > 1.0) || !(input.q > 1.0))
        throw std::invalid_argument("kms_verify: requires p > 1 and q > 1");
    if (!(input.c0 > 0.0) || input.c1 < 0.0 || input.psi2 < 0.0)
        throw std::invalid_argument("kms_verify: bad constants");
    if (!(t_max > 2.0) || samples < 2)
        throw std::invalid_argument("kms_verify: bad sampling request");

    KmsReport report;
    const double pstar = input.p / (input.p - 1.0);
    report.pstar = pstar;

    // C2 = (p*/(C0 p))^{p*-1} + (log 2)^{p*-1} Psi(2)
    //      + (C1/log 2) Int_2^inf (log tau)^{p*} tau^{-q} dtau
    const double log2 = std::log(2.0);
    double tail_integral = 0.0;
    if (input.c1 > 0.0) {
        const double decay = input.q - 1.0;
        auto integrand = [&](double s) {
            return std::pow(s, pstar) * std::exp(-decay * s);
        };
        double upper = log2 + 5.0;
        while (integrand(upper) > 1e-20) upper += 5.0;
        tail_integral = adaptive_simpson(integrand, log2, upper, 1e-13);
    }
    report.c2 = std::pow(pstar / (input.c0 * input.p), pstar - 1.0) +
                std::pow(log2, pstar - 1.0) * input.psi2 +
                input.c1 / log2 * tail_integral;

    // worst-case equality ODE in s = log t:
    //   dPsi/ds = -C0 |Psi|^p + C1 e^{(1-q) s}
    const double s_end = std::log(t_max);
    const int steps = std::max(200000, 64 * samples);
    const double h = (s_end - log2) / steps;
    auto rhs = [&](double s, double psi) {
        return -input.c0 * std::pow(std::abs(psi), input.p) +
               input.c1 * std::exp((1.0 - input.q) * s);
    };

    // sample indices, log-spaced in t means uniform in s
    std::vector<int> sample_at(samples);
    for (int i = 0; i < samples; ++i)
        sample_at[i] = static_cast<int>(
            std::llround(static_cast<double>(i) * steps / (samples - 1)));

    report.min_margin = std::numeric_limits<double>::infinity();
    double psi = input.psi2;
    int next = 0;
    for (int step = 0; step <= steps; ++step) {
        const double s = log2 + step * h;
        while (next < samples && sample_at[next] == step) {
            const double t = std::exp(s);
            const double bound = report.c2 / std::pow(s, pstar - 1.0);
            report.t.push_back(t);
            report.psi.push_back(psi);
            report.bound.push_back(bound);
            report.min_margin = std::min(report.min_margin, bound - psi);
            ++next;
        }
        if (step == steps) break;
        const double k1 = rhs(s, psi);
        const double k2 = rhs(s + 0.5 * h, psi + 0.5 * h * k1);
        const double k3 = rhs(s + 0.5 * h, psi + 0.5 * h * k2);
        const double k4 = rhs(s + h, psi + h * k3);
        psi += h / 6.0 * (k1 + 2.0 * (k2 + k3) + k4);
    }
    return report;
}

DecayFit fit_decay(const std::vector<std::pair<double, double>>& series,
                   DecayModel model, double eps, double t0, double t1) {
    DecayFit fit;
    fit.model = model;
    fit.t0 = t0;
    fit.t1 = t1;
    auto compensate = [&](double t, double v) {
        switch (model) {
            case DecayModel::PurePower: return v * std::sqrt(1.0 + t);
            case DecayModel::PowerLog:
                return v * std::sqrt((1.0 + t) *
                                     (1.0 + eps * eps * std::log(2.0 + t)));
            case DecayModel::LogOnly:
                return v * std::sqrt(1.0 + eps * eps * std::log(2.0 + t));
        }
        return v;
    };
    double cmin = std::numeric_limits<double>::infinity(), cmax = 0.0;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (const auto& [t, v] : series) {
        if (t < t0 || t > t1) continue;
        if (!(v > 0.0))
            throw std::invalid_argument("fit_decay: values must be positive");
        const double c = compensate(t, v);
        cmin = std::min(cmin, c);
        cmax = std::max(cmax, c);
        const double x = std::log(t), y = std::log(c);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++n;
    }
    if (n == 0) throw std::invalid_argument("fit_decay: empty fit window");
    fit.n_samples = n;
    fit.constancy_ratio = cmax / cmin;
    fit.slope = n > 1 ? (n * sxy - sx * sy) / (n * sxx - sx * sx) : 0.0;
    return fit;
}

ScatteringReport scattering_check(const CubicSystem& sys,
                                  const std::vector<ProfileState>& profiles,
                                  double delta) {
    if (!check_b3_exact(sys).holds())
        throw std::invalid_argument(
            "scattering_check: the symbol does not vanish (b3 fails); the "
            "free-scattering comparison would be meaningless");
    if (profiles.size() < 4)
        throw std::invalid_argument(
            "scattering_check: needs at least 4 profile snapshots");
    for (std::size_t i = 1; i < profiles.size(); ++i)
        if (profiles[i].t <= profiles[i - 1].t ||
            profiles[i].xi_grid != profiles[0].xi_grid)
            throw std::invalid_argument(
                "scattering_check: snapshots must share the grid and have "
                "increasing times");

    const ProfileState& plus = profiles.back();
    const double dxi = plus.xi_grid.size() > 1
                           ? plus.xi_grid[1] - plus.xi_grid[0]
                           : 1.0;
    ScatteringReport report;
    std::vector<std::pair<double, double>> series;
    for (std::size_t i = 0; i + 1 < profiles.size(); ++i) {
        double sup = 0.0, sum2 = 0.0;
        for (int j = 0; j < plus.n_components(); ++j)
            for (std::size_t q = 0; q < plus.xi_grid.size(); ++q) {
                const double d =
                    std::abs(profiles[i].alpha[j][q] - plus.alpha[j][q]);
                sup = std::max(sup, d);
                sum2 += d * d * dxi;
            }
        report.t.push_back(profiles[i].t);
        report.diff_linf.push_back(sup);
        report.diff_l2.push_back(std::sqrt(sum2));
        series.emplace_back(profiles[i].t, sup);
    }
    report.strictly_decreasing = true;
    for (std::size_t i = 1; i < report.diff_linf.size(); ++i)
        if (report.diff_linf[i] >= report.diff_linf[i - 1])
            report.strictly_decreasing = false;

    // plain log-log slope of the Cauchy differences
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const int n = static_cast<int>(series.size());
    for (const auto& [t, v] : series) {
        const double x = std::log(t), y = std::log(std::max(v, 1e-300));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    report.fitted_exponent =
        n > 1 ? (n * sxy - sx * sy) / (n * sxx - sx * sx) : 0.0;
    report.pass = report.strictly_decreasing &&
                  report.fitted_exponent <= -0.25 + delta;
    return report;
}

void write_profile_csv(const ProfileState& profile, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write: " + path);
    out << "# t " << format_double(profile.t) << "\n";
    out << "xi";
    for (int j = 1; j <= profile.n_components(); ++j)
        out << ",re_" << j << ",im_" << j;
    out << "\n";
    for (std::size_t q = 0; q < profile.xi_grid.size(); ++q) {
        out << format_double(profile.xi_grid[q]);
        for (int j = 0; j < profile.n_components(); ++j)
            out << "," << format_double(profile.alpha[j][q].real()) << ","
                << format_double(profile.alpha[j][q].imag());
        out << "\n";
    }
}

ProfileState read_profile_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open profile: " + path);
    ProfileState profile;
    std::string line;
    if (!std::getline(in, line) || line.rfind("# t ", 0) != 0)
        throw std::runtime_error("profile csv: missing time header");
    profile.t = std::stod(line.substr(4));
    if (!std::getline(in, line))
        throw std::runtime_error("profile csv: missing column header");
    const int n = static_cast<int>(std::count(line.begin(), line.end(), ',')) / 2;
    profile.alpha.resize(n);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string cell;
        std::getline(ls, cell, ',');
        profile.xi_grid.push_back(std::stod(cell));
        for (int j = 0; j < n; ++j) {
            double re, im;
            std::getline(ls, cell, ',');
            re = std::stod(cell);
            std::getline(ls, cell, ',');
            im = std::stod(cell);
            profile.alpha[j].push_back(cplx{re, im});
        }
    }
    return profile;
}

}  // namespace dnls
