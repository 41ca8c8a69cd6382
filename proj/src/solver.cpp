#include "dnls/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "dnls/io.hpp"

namespace dnls {

namespace {

using Spectral = std::vector<std::vector<cplx>>;

Spectral to_spectral(const FieldState& state) {
    const Fft& fft = fft_for(state.grid.nx);
    Spectral hat(state.values.size());
    for (std::size_t j = 0; j < state.values.size(); ++j)
        hat[j] = fft.forward(state.values[j]);
    return hat;
}

FieldState from_spectral(const Spectral& hat, double t, const Grid1D& grid) {
    const Fft& fft = fft_for(grid.nx);
    FieldState state{t, grid, {}};
    state.values.resize(hat.size());
    for (std::size_t j = 0; j < hat.size(); ++j)
        state.values[j] = fft.backward(hat[j]);
    return state;
}

void dealias_band(const Grid1D& grid, std::vector<cplx>& hat) {
    const int cut = grid.dealias_cut();
    for (int n = 0; n < grid.nx; ++n) {
        const int s = n <= grid.nx / 2 ? n : n - grid.nx;
        if (std::abs(s) > cut) hat[n] = cplx{0.0, 0.0};
    }
}

// exp(-i k^2 dt / (2 m_j)) per mode; shared by free_propagate and the
// integrating factor so the two agree bitwise.
std::vector<cplx> linear_phase(const Grid1D& grid, double dt, double m) {
    std::vector<cplx> phase(grid.nx);
    for (int n = 0; n < grid.nx; ++n) {
        const double k = grid.wavenumber(n);
        phase[n] = std::polar(1.0, -k * k * dt / (2.0 * m));
    }
    return phase;
}

// -i F_hat from spectral data.
Spectral rhs_from_spectral(const CubicSystem& sys, const Grid1D& grid,
                           const Spectral& hat, bool dealias) {
    const int n = sys.n_components();
    const int nx = grid.nx;
    const Fft& fft = fft_for(nx);

    // physical u and u_x per component, from the (optionally truncated)
    // spectrum
    std::vector<std::vector<cplx>> u(n), ux(n);
    std::vector<cplx> tmp(nx);
    for (int j = 0; j < n; ++j) {
        std::vector<cplx> hj = hat[j];
        if (dealias) dealias_band(grid, hj);
        u[j] = fft.backward(hj);
        for (int i = 0; i < nx; ++i)
            tmp[i] = cplx{0.0, grid.wavenumber(i)} * hj[i];
        ux[j] = fft.backward(tmp);
    }

    std::vector<std::vector<cplx>> f(n, std::vector<cplx>(nx, cplx{}));
    std::vector<cplx> term(nx);
    for (const Monomial& mono : sys.monomials()) {
        std::fill(term.begin(), term.end(), mono.coeff);
        for (const Factor& fac : mono.factors) {
            if (fac.k <= n) {
                const std::vector<cplx>& src = fac.l ? ux[fac.k - 1]
                                                     : u[fac.k - 1];
                for (int i = 0; i < nx; ++i) term[i] *= src[i];
            } else {
                const std::vector<cplx>& src =
                    fac.l ? ux[fac.k - n - 1] : u[fac.k - n - 1];
                for (int i = 0; i < nx; ++i) term[i] *= std::conj(src[i]);
            }
        }
        std::vector<cplx>& target = f[mono.target - 1];
        for (int i = 0; i < nx; ++i) target[i] += term[i];
    }

    Spectral out(n);
    for (int j = 0; j < n; ++j) {
        out[j] = fft.forward(f[j]);
        for (cplx& v : out[j]) v *= cplx{0.0, -1.0};
        if (dealias) dealias_band(grid, out[j]);
    }
    return out;
}

Spectral step_ifrk4_spectral(const CubicSystem& sys, const Grid1D& grid,
                             const Spectral& hat, double dt, bool dealias) {
    const int n = sys.n_components();
    const int nx = grid.nx;
    std::vector<std::vector<cplx>> e_half(n), e_full(n);
    for (int j = 0; j < n; ++j) {
        e_half[j] = linear_phase(grid, 0.5 * dt, sys.masses().m[j]);
        e_full[j] = linear_phase(grid, dt, sys.masses().m[j]);
    }
    auto axpy = [&](const Spectral& a, double c, const Spectral& b) {
        Spectral r(n, std::vector<cplx>(nx));
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < nx; ++i) r[j][i] = a[j][i] + c * b[j][i];
        return r;
    };
    auto mul = [&](const std::vector<std::vector<cplx>>& phase,
                   const Spectral& a) {
        Spectral r(n, std::vector<cplx>(nx));
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < nx; ++i) r[j][i] = phase[j][i] * a[j][i];
        return r;
    };

    const Spectral k1 = rhs_from_spectral(sys, grid, hat, dealias);
    const Spectral k2 = rhs_from_spectral(
        sys, grid, mul(e_half, axpy(hat, 0.5 * dt, k1)), dealias);
    const Spectral k3 = rhs_from_spectral(
        sys, grid, axpy(mul(e_half, hat), 0.5 * dt, k2), dealias);
    const Spectral k4 = rhs_from_spectral(
        sys, grid, axpy(mul(e_full, hat), dt, mul(e_half, k3)), dealias);

    Spectral out(n, std::vector<cplx>(nx));
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < nx; ++i) {
            const cplx acc = e_full[j][i] * (hat[j][i] + dt / 6.0 * k1[j][i]) +
                             dt / 6.0 * (e_half[j][i] *
                                         (2.0 * (k2[j][i] + k3[j][i]))) +
                             dt / 6.0 * k4[j][i];
            out[j][i] = acc;
        }
    return out;
}

}  // namespace

FieldState free_propagate(const FieldState& state, double dt,
                          const MassVector& masses) {
    if (!std::isfinite(dt)) throw std::invalid_argument("dt must be finite");
    if (masses.size() != state.n_components())
        throw std::invalid_argument("free_propagate: component mismatch");
    Spectral hat = to_spectral(state);
    for (int j = 0; j < state.n_components(); ++j) {
        const std::vector<cplx> phase =
            linear_phase(state.grid, dt, masses.m[j]);
        for (int i = 0; i < state.grid.nx; ++i) hat[j][i] *= phase[i];
    }
    return from_spectral(hat, state.t + dt, state.grid);
}

std::vector<std::vector<cplx>> nonlinear_rhs(const CubicSystem& sys,
                                             const FieldState& state,
                                             bool dealias) {
    return rhs_from_spectral(sys, state.grid, to_spectral(state), dealias);
}

FieldState step_ifrk4(const CubicSystem& sys, const FieldState& state,
                      double dt, bool dealias) {
    const Spectral hat = to_spectral(state);
    return from_spectral(step_ifrk4_spectral(sys, state.grid, hat, dt, dealias),
                         state.t + dt, state.grid);
}

Trajectory run(const CubicSystem& sys, const SolverConfig& config,
               const FieldState& initial) {
    if (initial.t != 0.0)
        throw std::invalid_argument("run: initial state must have t = 0");
    if (!(config.dt > 0.0) || config.dt > config.t_end)
        throw std::invalid_argument("run: need 0 < dt <= t_end");

    const Grid1D grid = initial.grid;
    const long n_steps = std::llround(config.t_end / config.dt);

    auto step_of = [&](double t) {
        return std::clamp<long>(std::llround(t / config.dt), 0, n_steps);
    };
    // map requested times to the nearest step
    std::vector<std::pair<long, int>> sample_steps;  // (step, kind 0=obs,1=snap)
    for (double t : config.sample_times) sample_steps.push_back({step_of(t), 0});
    for (double t : config.snapshot_times)
        sample_steps.push_back({step_of(t), 1});
    std::sort(sample_steps.begin(), sample_steps.end());

    Trajectory traj;
    Spectral hat = to_spectral(initial);
    std::size_t next = 0;
    for (long step = 0; step <= n_steps; ++step) {
        const double t = step * config.dt;
        bool need_state = false;
        while (next < sample_steps.size() && sample_steps[next].first == step) {
            need_state = true;
            ++next;
        }
        if (need_state) {
            const FieldState state = from_spectral(hat, t, grid);
            double linf_max = 0.0;
            for (const auto& comp : state.values)
                linf_max = std::max(linf_max, linf_norm(comp));
            if (!std::isfinite(linf_max) || linf_max > config.blowup_ceiling) {
                traj.completed = false;
                traj.blowup_time = t - config.dt;
                return traj;
            }
            // replay the markers for this step now that the state exists
            std::size_t cursor = next;
            while (cursor > 0 && sample_steps[cursor - 1].first == step) --cursor;
            for (std::size_t s = cursor; s < next; ++s) {
                if (sample_steps[s].second == 0)
                    traj.samples.push_back(measure(sys, state, config.record_j));
                else
                    traj.snapshots.push_back(state);
            }
        }
        if (step == n_steps) break;
        hat = step_ifrk4_spectral(sys, grid, hat, config.dt, config.dealias);
        // cheap per-step guard on mode zero staying finite
        if (!std::isfinite(std::abs(hat[0][0]))) {
            traj.completed = false;
            traj.blowup_time = t;
            return traj;
        }
    }
    return traj;
}

std::vector<cplx> scaled_fourier(std::span<const cplx> phi, const Grid1D& grid,
                                 double m, std::span<const double> xi) {
    if (m == 0.0) throw std::invalid_argument("scaled_fourier: m must be != 0");
    if (static_cast<int>(phi.size()) != grid.nx)
        throw std::invalid_argument("scaled_fourier: size mismatch");
    const double dx = grid.dx();
    const cplx prefactor =
        std::sqrt(std::abs(m)) *
        std::polar(1.0, -std::numbers::pi / 4.0 * (m > 0 ? 1.0 : -1.0)) * dx /
        std::sqrt(2.0 * std::numbers::pi);
    // the trig interpolant carries no content beyond the Nyquist band;
    // evaluating the semidiscrete sum there would alias, so return 0
    const double eta_max = std::numbers::pi / dx;
    std::vector<cplx> out(xi.size());
    for (std::size_t q = 0; q < xi.size(); ++q) {
        const double eta = m * xi[q];
        if (std::abs(eta) > eta_max) {
            out[q] = cplx{0.0, 0.0};
            continue;
        }
        const cplx step = std::polar(1.0, -dx * eta);
        cplx phase = std::polar(1.0, -grid.node(0) * eta);
        cplx acc{0.0, 0.0};
        for (int i = 0; i < grid.nx; ++i) {
            acc += phase * phi[i];
            phase *= step;
        }
        out[q] = prefactor * acc;
    }
    return out;
}

JResult apply_J(const FieldState& state, int component,
                const MassVector& masses) {
    if (!(state.t > 0.0))
        throw std::invalid_argument("apply_J: requires t > 0");
    const double m = masses.m[component - 1];
    const Grid1D& grid = state.grid;
    const std::vector<cplx>& u = state.values[component - 1];

    JResult result;
    result.boundary_warning = boundary_amplitude_ratio(grid, u) > 1e-8;

    std::vector<cplx> modulated(grid.nx);
    for (int i = 0; i < grid.nx; ++i) {
        const double x = grid.node(i);
        modulated[i] = std::polar(1.0, -m * x * x / (2.0 * state.t)) * u[i];
    }
    const std::vector<cplx> dmod = spectral_derivative(grid, modulated);
    result.values.resize(grid.nx);
    const cplx it_over_m{0.0, state.t / m};
    for (int i = 0; i < grid.nx; ++i) {
        const double x = grid.node(i);
        result.values[i] =
            it_over_m * std::polar(1.0, m * x * x / (2.0 * state.t)) * dmod[i];
    }
    return result;
}

std::vector<cplx> free_asymptotic_approx(const FieldState& state,
                                         int component,
                                         const MassVector& masses) {
    if (!(state.t > 0.0))
        throw std::invalid_argument("free_asymptotic_approx: requires t > 0");
    const Grid1D& grid = state.grid;
    const double m = masses.m[component - 1];
    const double t = state.t;

    // U_m^{-1} u: undo the free flow spectrally
    const Fft& fft = fft_for(grid.nx);
    std::vector<cplx> hat = fft.forward(state.values[component - 1]);
    for (int i = 0; i < grid.nx; ++i) {
        const double k = grid.wavenumber(i);
        hat[i] *= std::polar(1.0, k * k * t / (2.0 * m));
    }
    const std::vector<cplx> w = fft.backward(hat);

    std::vector<double> xi(grid.nx);
    for (int i = 0; i < grid.nx; ++i) xi[i] = grid.node(i) / t;
    const std::vector<cplx> beta = scaled_fourier(w, grid, m, xi);

    std::vector<cplx> out(grid.nx);
    const double inv_sqrt_t = 1.0 / std::sqrt(t);
    for (int i = 0; i < grid.nx; ++i) {
        const double x = grid.node(i);
        out[i] = std::polar(1.0, m * x * x / (2.0 * t)) * inv_sqrt_t * beta[i];
    }
    return out;
}

FieldState make_initial(const Grid1D& grid, int n_components, double eps,
                        const InitialData& data) {
    if (data.kind == InitialData::Kind::File) {
        FieldState state = read_snapshot(data.path);
        if (state.n_components() != n_components)
            throw std::runtime_error("initial snapshot: component mismatch");
        state.t = 0.0;
        return state;
    }
    FieldState state{0.0, grid, {}};
    state.values.assign(n_components, std::vector<cplx>(grid.nx));
    for (int j = 0; j < n_components; ++j) {
        const cplx amp = j < static_cast<int>(data.amplitudes.size())
                             ? data.amplitudes[j]
                             : cplx{1.0, 0.0};
        for (int i = 0; i < grid.nx; ++i) {
            const double x = grid.node(i);
            cplx v = eps * amp * std::exp(-x * x / (data.sigma * data.sigma));
            if (data.kind == InitialData::Kind::ModulatedGaussian)
                v *= std::polar(1.0, data.velocity * x);
            state.values[j][i] = v;
        }
    }
    return state;
}

double l2_norm(const Grid1D& grid, std::span<const cplx> u) {
    double sum = 0.0;
    for (const cplx& v : u) sum += std::norm(v);
    return std::sqrt(sum * grid.dx());
}

double linf_norm(std::span<const cplx> u) {
    double max = 0.0;
    for (const cplx& v : u) max = std::max(max, std::abs(v));
    return max;
}

std::vector<cplx> spectral_derivative(const Grid1D& grid,
                                      std::span<const cplx> u) {
    const Fft& fft = fft_for(grid.nx);
    std::vector<cplx> hat(u.begin(), u.end());
    hat = fft.forward(hat);
    for (int i = 0; i < grid.nx; ++i)
        hat[i] *= cplx{0.0, grid.wavenumber(i)};
    return fft.backward(hat);
}

Observables measure(const CubicSystem& sys, const FieldState& state,
                    bool record_j) {
    Observables obs;
    obs.t = state.t;
    for (int j = 0; j < state.n_components(); ++j) {
        const auto& u = state.values[j];
        obs.l2.push_back(l2_norm(state.grid, u));
        obs.linf.push_back(linf_norm(u));
        const std::vector<cplx> ux = spectral_derivative(state.grid, u);
        obs.w1inf.push_back(obs.linf.back() + linf_norm(ux));
        if (record_j && state.t > 0.0) {
            const JResult jres = apply_J(state, j + 1, sys.masses());
            obs.j_l2.push_back(l2_norm(state.grid, jres.values));
        }
    }
    return obs;
}

double boundary_amplitude_ratio(const Grid1D& grid, std::span<const cplx> u) {
    const int margin = std::max(1, grid.nx / 50);
    double edge = 0.0, global = 0.0;
    for (int i = 0; i < grid.nx; ++i) {
        const double a = std::abs(u[i]);
        global = std::max(global, a);
        if (i < margin || i >= grid.nx - margin) edge = std::max(edge, a);
    }
    return global > 0.0 ? edge / global : 0.0;
}

}  // namespace dnls
