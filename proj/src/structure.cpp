#include "dnls/structure.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

namespace dnls {

namespace {
constexpr double kHermitianTol = 1e-12;
constexpr double kSlackTol = 1e-10;   // slack on sup g
constexpr double kMassTolRel = 1e-9;  // resonance sum tolerance
}  // namespace

HermitianForm::HermitianForm(Eigen::MatrixXcd entries) : a_(std::move(entries)) {
    if (a_.rows() != a_.cols() || a_.rows() < 1)
        throw std::invalid_argument("Hermitian form must be square");
    const double scale = std::max(1.0, a_.cwiseAbs().maxCoeff());
    if ((a_ - a_.adjoint()).cwiseAbs().maxCoeff() > kHermitianTol * scale)
        throw std::invalid_argument("matrix is not Hermitian");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(a_);
    kappa_min_ = es.eigenvalues().minCoeff();
    kappa_max_ = es.eigenvalues().maxCoeff();
    if (!(kappa_min_ > 0.0))
        throw std::invalid_argument("Hermitian form is not positive definite");
}

HermitianForm HermitianForm::identity(int n) {
    return HermitianForm(Eigen::MatrixXcd::Identity(n, n));
}

HermitianForm HermitianForm::diagonal(const std::vector<double>& d) {
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) a(i, i) = d[i];
    return HermitianForm(a);
}

// Text format: first token N, then N*N entries as "re im" pairs, row-major.
HermitianForm load_hermitian(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open matrix file: " + path);
    int n = 0;
    if (!(in >> n) || n < 1)
        throw std::runtime_error("matrix file: bad dimension");
    Eigen::MatrixXcd a(n, n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) {
            double re, im;
            if (!(in >> re >> im))
                throw std::runtime_error("matrix file: missing entries");
            a(r, c) = cplx{re, im};
        }
    return HermitianForm(std::move(a));
}

cplx quartic_form(const CubicSystem& sys, const HermitianForm& A, double xi,
                  std::span<const cplx> Y) {
    const int n = sys.n_components();
    if (A.size() != n || static_cast<int>(Y.size()) != n)
        throw std::invalid_argument("quartic_form: dimension mismatch");
    const std::vector<cplx> p = sys.symbol_p(xi, Y);
    Eigen::Map<const Eigen::VectorXcd> yv(Y.data(), n);
    const Eigen::VectorXcd ay = A.entries() * yv;
    cplx out{0.0, 0.0};
    for (int j = 0; j < n; ++j) out += p[j] * std::conj(ay[j]);
    return out;
}

SamplePlan SamplePlan::standard(int xi_points, int sphere_samples,
                                std::uint64_t seed) {
    if (xi_points < 1 || sphere_samples < 1)
        throw std::invalid_argument("sample plan: counts must be >= 1");
    SamplePlan plan;
    plan.sphere_samples = sphere_samples;
    plan.seed = seed;
    plan.xi_samples.reserve(xi_points);
    for (int i = 0; i < xi_points; ++i) {
        const double theta =
            -std::numbers::pi / 2 +
            std::numbers::pi * (i + 0.5) / static_cast<double>(xi_points);
        plan.xi_samples.push_back(std::tan(theta));
    }
    return plan;
}

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::HoldsExactly: return "holds-exactly";
        case Verdict::HoldsOnSamples: return "holds-on-samples";
        case Verdict::Violated: return "violated";
    }
    return "?";
}

ConditionReport check_condition_a(const CubicSystem& sys) {
    ConditionReport report;
    report.condition = "a";
    for (const Monomial& mono : sys.monomials()) {
        const double mj = sys.masses().m[mono.target - 1];
        double sum = 0.0, mag = 0.0;
        for (const Factor& f : mono.factors) {
            const double mt = sys.masses().extended(f.k);
            sum += mt;
            mag += std::abs(mt);
        }
        const double tol = kMassTolRel * (std::abs(mj) + mag);
        if (std::abs(mj - sum) > tol && std::abs(mono.coeff) > kCoeffZeroTol)
            report.offending.push_back(mono);
    }
    report.verdict =
        report.offending.empty() ? Verdict::HoldsExactly : Verdict::Violated;
    return report;
}

ConditionReport check_gauge_invariance(const CubicSystem& sys) {
    if (sys.n_components() != 1)
        throw std::invalid_argument(
            "gauge invariance check is defined for N = 1 only");
    ConditionReport report;
    report.condition = "gauge";
    for (const Monomial& mono : sys.monomials()) {
        if (mono.gauge_weight(1) != 1 && std::abs(mono.coeff) > kCoeffZeroTol)
            report.offending.push_back(mono);
    }
    report.verdict =
        report.offending.empty() ? Verdict::HoldsExactly : Verdict::Violated;
    return report;
}

namespace {

// Unit-sphere sample set: coordinate directions, two-coordinate
// equal-magnitude phases, then seeded complex Gaussians.
std::vector<std::vector<cplx>> sphere_points(int n, const SamplePlan& plan) {
    std::vector<std::vector<cplx>> pts;
    for (int j = 0; j < n; ++j) {
        std::vector<cplx> y(n, cplx{0.0, 0.0});
        y[j] = 1.0;
        pts.push_back(std::move(y));
    }
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b)
            for (int ph = 0; ph < 8; ++ph) {
                const double angle = 2.0 * std::numbers::pi * ph / 8.0;
                std::vector<cplx> y(n, cplx{0.0, 0.0});
                y[a] = inv_sqrt2;
                y[b] = inv_sqrt2 * std::polar(1.0, angle);
                pts.push_back(std::move(y));
            }
    std::mt19937_64 rng(plan.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int s = 0; s < plan.sphere_samples; ++s) {
        std::vector<cplx> y(n);
        double norm2 = 0.0;
        for (cplx& v : y) {
            v = cplx{gauss(rng), gauss(rng)};
            norm2 += std::norm(v);
        }
        if (norm2 == 0.0) continue;
        const double inv = 1.0 / std::sqrt(norm2);
        for (cplx& v : y) v *= inv;
        pts.push_back(std::move(y));
    }
    return pts;
}

struct CubicInXi {
    double c0, c1, c2, c3;
};

// h(xi) = Im<p(xi;Y), AY> is a real cubic in xi; recover its coefficients
// by exact interpolation at xi = 0, 1, -1, 2.
CubicInXi im_form_coefficients(const CubicSystem& sys, const HermitianForm& A,
                               std::span<const cplx> Y) {
    const double h0 = std::imag(quartic_form(sys, A, 0.0, Y));
    const double h1 = std::imag(quartic_form(sys, A, 1.0, Y));
    const double hm1 = std::imag(quartic_form(sys, A, -1.0, Y));
    const double h2 = std::imag(quartic_form(sys, A, 2.0, Y));
    CubicInXi c{};
    c.c0 = h0;
    c.c2 = 0.5 * (h1 + hm1) - h0;
    const double s1 = 0.5 * (h1 - hm1);        // c1 + c3
    const double s2 = h2 - c.c0 - 4.0 * c.c2;  // 2 c1 + 8 c3
    c.c3 = (s2 - 2.0 * s1) / 6.0;
    c.c1 = s1 - c.c3;
    return c;
}

double weight(DissipLevel level, double xi) {
    return level == DissipLevel::B2 ? 1.0 + xi * xi : 1.0;
}

}  // namespace

ConditionReport check_dissipativity(const CubicSystem& sys,
                                    const HermitianForm& A,
                                    const SamplePlan& plan,
                                    DissipLevel level) {
    const int n = sys.n_components();
    if (A.size() != n)
        throw std::invalid_argument("check_dissipativity: dimension mismatch");

    ConditionReport report;
    report.condition = level == DissipLevel::B0   ? "b0"
                       : level == DissipLevel::B1 ? "b1"
                                                  : "b2";
    report.matrix = A;

    double sup = -std::numeric_limits<double>::infinity();
    SampleWitness best;
    auto consider = [&](double xi, const std::vector<cplx>& Y, double g) {
        if (g > sup) {
            sup = g;
            best = SampleWitness{xi, Y, g};
        }
    };

    bool tail_violation = false;
    for (const std::vector<cplx>& Y : sphere_points(n, plan)) {
        const CubicInXi c = im_form_coefficients(sys, A, Y);
        const double coeff_scale =
            std::abs(c.c0) + std::abs(c.c1) + std::abs(c.c2) + std::abs(c.c3);
        const double tolz = 1e-9 * (coeff_scale + 1.0);
        const bool cubic_tail = std::abs(c.c3) > tolz;
        if (level == DissipLevel::B2) {
            if (cubic_tail) tail_violation = true;
            // lim h/<xi>^2 as xi -> +-inf is c2 once c3 vanishes
            if (!cubic_tail) consider(std::numeric_limits<double>::infinity(),
                                      Y, c.c2);
        } else if (cubic_tail || c.c2 > tolz ||
                   (std::abs(c.c2) <= tolz && std::abs(c.c1) > tolz)) {
            tail_violation = true;
        }
        // exact finite-xi supremum: evaluate g at the critical points of
        // h (b0/b1) or of h/<xi>^2 (b2), so a maximum between grid nodes
        // cannot be missed
        const auto consider_at = [&](double xi) {
            if (!std::isfinite(xi)) return;
            const double g =
                std::imag(quartic_form(sys, A, xi, Y)) / weight(level, xi);
            consider(xi, Y, g);
        };
        if (!cubic_tail) {
            if (level == DissipLevel::B2) {
                // d/dxi [(c2 xi^2 + c1 xi + c0)/(1 + xi^2)] = 0 reduces to
                // -c1 xi^2 + 2 (c2 - c0) xi + c1 = 0
                const double qa = -c.c1;
                const double qb = 2.0 * (c.c2 - c.c0);
                const double qc = c.c1;
                if (std::abs(qa) > tolz) {
                    const double disc = qb * qb - 4.0 * qa * qc;
                    if (disc >= 0.0) {
                        const double r = std::sqrt(disc);
                        consider_at((-qb + r) / (2.0 * qa));
                        consider_at((-qb - r) / (2.0 * qa));
                    }
                } else if (std::abs(qb) > tolz) {
                    consider_at(-qc / qb);
                }
            } else if (c.c2 < -tolz) {
                consider_at(-c.c1 / (2.0 * c.c2));
            }
        }
        if (tail_violation && !report.witness) {
            // locate a concrete large-|xi| point where g is positive
            double worst_g = -std::numeric_limits<double>::infinity();
            double worst_xi = 0.0;
            for (int k = 1; k <= 9; ++k)
                for (double sgn : {1.0, -1.0}) {
                    const double xi = sgn * std::pow(10.0, k);
                    const double g =
                        std::imag(quartic_form(sys, A, xi, Y)) /
                        weight(level, xi);
                    if (g > worst_g) {
                        worst_g = g;
                        worst_xi = xi;
                    }
                }
            report.witness = SampleWitness{worst_xi, Y, worst_g};
        }
        for (double xi : plan.xi_samples) {
            const double g =
                std::imag(quartic_form(sys, A, xi, Y)) / weight(level, xi);
            consider(xi, Y, g);
        }
    }

    report.margin = -sup;
    const bool negative_definite = sup <= -kSlackTol;
    bool holds;
    if (level == DissipLevel::B0) {
        holds = !tail_violation && sup <= kSlackTol;
    } else {
        holds = !tail_violation && negative_definite;
        if (holds) report.constant = -sup;
    }
    report.verdict = holds ? Verdict::HoldsOnSamples : Verdict::Violated;
    if (!holds && !report.witness) report.witness = best;
    return report;
}

ConditionReport check_b3_exact(const CubicSystem& sys) {
    ConditionReport report;
    report.condition = "b3";

    // Collapse the symbol: key = (target, xi-degree, sorted component
    // indices); the value accumulates coeff * prod(i * mt_k) over the
    // derivative-carrying factors.
    using Key = std::tuple<int, int, std::array<int, 3>>;
    std::map<Key, cplx> collapsed;
    std::map<Key, const Monomial*> representative;
    for (const Monomial& mono : sys.monomials()) {
        std::array<int, 3> ks{mono.factors[0].k, mono.factors[1].k,
                              mono.factors[2].k};
        std::sort(ks.begin(), ks.end());
        cplx contrib = mono.coeff;
        for (const Factor& f : mono.factors)
            if (f.l) contrib *= cplx{0.0, sys.masses().extended(f.k)};
        const Key key{mono.target, mono.derivative_count(), ks};
        collapsed[key] += contrib;
        representative.emplace(key, &mono);
    }
    for (const auto& [key, value] : collapsed) {
        if (std::abs(value) > kCoeffZeroTol)
            report.offending.push_back(*representative.at(key));
    }
    report.verdict =
        report.offending.empty() ? Verdict::HoldsExactly : Verdict::Violated;
    return report;
}

std::optional<HermitianForm> search_diagonal_A(const CubicSystem& sys,
                                               const SamplePlan& plan,
                                               DissipLevel level) {
    const int n = sys.n_components();
    if (n > 4)
        throw std::invalid_argument("diagonal search supports N <= 4");
    if (level == DissipLevel::B2)
        throw std::invalid_argument("diagonal search targets b0 or b1");

    auto margin_of = [&](const std::vector<double>& diag) {
        return check_dissipativity(sys, HermitianForm::diagonal(diag), plan,
                                   level)
            .margin;
    };

    std::vector<double> best(n, 1.0);
    double best_margin = margin_of(best);

    // Coarse grid over powers of two per free coordinate, A_11 fixed to 1.
    const int total = static_cast<int>(std::pow(7.0, n - 1));
    for (int idx = 0; idx < total; ++idx) {
        std::vector<double> diag(n, 1.0);
        int rest = idx;
        for (int j = 1; j < n; ++j) {
            diag[j] = std::pow(2.0, rest % 7 - 3);
            rest /= 7;
        }
        const double margin = margin_of(diag);
        if (margin > best_margin) {
            best_margin = margin;
            best = diag;
        }
    }
    // Local refinement around the best grid point.
    for (int round = 0; round < 3; ++round) {
        for (int j = 1; j < n; ++j) {
            for (double factor : {0.8, 1.25}) {
                std::vector<double> diag = best;
                diag[j] *= factor;
                const double margin = margin_of(diag);
                if (margin > best_margin) {
                    best_margin = margin;
                    best = diag;
                }
            }
        }
    }

    HermitianForm a = HermitianForm::diagonal(best);
    if (check_dissipativity(sys, a, plan, level).holds()) return a;
    return std::nullopt;
}

std::string format_report(const ConditionReport& report) {
    std::ostringstream os;
    os.precision(12);
    os << "condition (" << report.condition
       << "): " << to_string(report.verdict) << "\n";
    if (report.constant) os << "  constant: " << *report.constant << "\n";
    if (report.condition == "b0" || report.condition == "b1" ||
        report.condition == "b2")
        os << "  margin (-sup g): " << report.margin << "\n";
    for (const Monomial& mono : report.offending)
        os << "  offending monomial: " << mono.to_string() << "\n";
    if (report.witness) {
        os << "  witness: xi = " << report.witness->xi << ", Y = (";
        for (std::size_t j = 0; j < report.witness->Y.size(); ++j) {
            if (j) os << ", ";
            os << report.witness->Y[j].real() << "+"
               << report.witness->Y[j].imag() << "i";
        }
        os << "), g = " << report.witness->value << "\n";
    }
    if (report.matrix) {
        os << "  A (kappa in [" << report.matrix->kappa_min() << ", "
           << report.matrix->kappa_max() << "]):\n";
        os << report.matrix->entries() << "\n";
    }
    if (!report.detail.empty()) os << "  " << report.detail << "\n";
    return os.str();
}

}  // namespace dnls
