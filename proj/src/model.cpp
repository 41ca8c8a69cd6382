#include "dnls/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace dnls {

double MassVector::extended(int k) const {
    const int n = size();
    if (k < 1 || k > 2 * n)
        throw std::out_of_range("extended mass index " + std::to_string(k) +
                                " outside 1.." + std::to_string(2 * n));
    return k <= n ? m[k - 1] : -m[k - n - 1];
}

int Monomial::gauge_weight(int n_components) const {
    int w = 0;
    for (const Factor& f : factors) w += f.k <= n_components ? 1 : -1;
    return w;
}

int Monomial::derivative_count() const {
    return factors[0].l + factors[1].l + factors[2].l;
}

std::string Monomial::to_string() const {
    std::ostringstream os;
    os << "eq " << target << ": (" << coeff.real();
    if (coeff.imag() >= 0) os << "+";
    os << coeff.imag() << "i)";
    for (const Factor& f : factors) {
        os << " [k=" << f.k << ",l=" << f.l << "]";
    }
    return os.str();
}

CubicSystem::CubicSystem(int n_components, MassVector masses,
                         std::vector<Monomial> monomials)
    : n_(n_components),
      masses_(std::move(masses)),
      monomials_(std::move(monomials)) {
    validate();
}

void CubicSystem::validate() const {
    if (n_ < 1) throw std::invalid_argument("component count must be >= 1");
    if (masses_.size() != n_)
        throw std::invalid_argument("mass vector size does not match N");
    for (double mj : masses_.m) {
        if (!std::isfinite(mj) || mj == 0.0)
            throw std::invalid_argument("masses must be finite and nonzero");
    }
    for (const Monomial& mono : monomials_) {
        if (mono.target < 1 || mono.target > n_)
            throw std::invalid_argument("monomial target out of range");
        for (const Factor& f : mono.factors) {
            if (f.k < 1 || f.k > 2 * n_)
                throw std::invalid_argument("factor index out of range");
            if (f.l != 0 && f.l != 1)
                throw std::invalid_argument("derivative flag must be 0 or 1");
        }
    }
}

void CubicSystem::canonicalize() {
    for (Monomial& mono : monomials_) {
        std::sort(mono.factors.begin(), mono.factors.end());
    }
    std::stable_sort(monomials_.begin(), monomials_.end(),
                     [](const Monomial& a, const Monomial& b) {
                         if (a.target != b.target) return a.target < b.target;
                         return a.factors < b.factors;
                     });
    std::vector<Monomial> merged;
    for (const Monomial& mono : monomials_) {
        if (!merged.empty() && merged.back().target == mono.target &&
            merged.back().factors == mono.factors) {
            merged.back().coeff += mono.coeff;
        } else {
            merged.push_back(mono);
        }
    }
    std::erase_if(merged, [](const Monomial& mono) {
        return std::abs(mono.coeff) < kCoeffZeroTol;
    });
    monomials_ = std::move(merged);
}

std::vector<cplx> CubicSystem::evaluate_F(std::span<const cplx> u,
                                          std::span<const cplx> ux) const {
    if (static_cast<int>(u.size()) != n_ || static_cast<int>(ux.size()) != n_)
        throw std::invalid_argument("evaluate_F: wrong tuple size");
    std::vector<cplx> out(n_, cplx{0.0, 0.0});
    for (const Monomial& mono : monomials_) {
        cplx term = mono.coeff;
        for (const Factor& f : mono.factors) {
            if (f.k <= n_) {
                term *= f.l ? ux[f.k - 1] : u[f.k - 1];
            } else {
                term *= std::conj(f.l ? ux[f.k - n_ - 1] : u[f.k - n_ - 1]);
            }
        }
        out[mono.target - 1] += term;
    }
    return out;
}

std::vector<cplx> CubicSystem::symbol_p(double xi,
                                        std::span<const cplx> Y) const {
    if (static_cast<int>(Y.size()) != n_)
        throw std::invalid_argument("symbol_p: wrong vector size");
    std::vector<cplx> out(n_, cplx{0.0, 0.0});
    for (const Monomial& mono : monomials_) {
        cplx term = mono.coeff;
        for (const Factor& f : mono.factors) {
            const cplx y = f.k <= n_ ? Y[f.k - 1] : std::conj(Y[f.k - n_ - 1]);
            term *= y;
            if (f.l) term *= cplx{0.0, masses_.extended(f.k) * xi};
        }
        out[mono.target - 1] += term;
    }
    return out;
}

bool CubicSystem::gauge_weight_one() const {
    return std::all_of(monomials_.begin(), monomials_.end(),
                       [this](const Monomial& mono) {
                           return mono.gauge_weight(n_) == 1;
                       });
}

CubicSystem parse_model(std::istream& in) {
    int n = 0;
    MassVector masses;
    std::vector<Monomial> monomials;
    bool saw_n = false, saw_masses = false;

    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string key;
        if (!(ls >> key)) continue;
        auto fail = [&](const std::string& why) {
            throw std::runtime_error("model file line " +
                                     std::to_string(lineno) + ": " + why);
        };
        if (key == "N") {
            if (!(ls >> n) || n < 1) fail("bad component count");
            saw_n = true;
        } else if (key == "masses") {
            if (!saw_n) fail("masses before N");
            masses.m.resize(n);
            for (double& mj : masses.m)
                if (!(ls >> mj)) fail("expected " + std::to_string(n) +
                                      " mass entries");
            saw_masses = true;
        } else if (key == "monomial") {
            if (!saw_n) fail("monomial before N");
            Monomial mono;
            double re = 0, im = 0;
            if (!(ls >> mono.target)) fail("bad monomial target");
            for (Factor& f : mono.factors)
                if (!(ls >> f.k >> f.l)) fail("bad monomial factor");
            if (!(ls >> re >> im)) fail("bad monomial coefficient");
            mono.coeff = cplx{re, im};
            monomials.push_back(mono);
        } else {
            fail("unknown directive '" + key + "'");
        }
    }
    if (!saw_n || !saw_masses)
        throw std::runtime_error("model file: missing N or masses");
    CubicSystem sys(n, std::move(masses), std::move(monomials));
    sys.canonicalize();
    return sys;
}

CubicSystem load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open model file: " + path);
    return parse_model(in);
}

void save_model(const CubicSystem& sys, std::ostream& out,
                const std::string& header_comment) {
    if (!header_comment.empty()) {
        std::istringstream hs(header_comment);
        std::string line;
        while (std::getline(hs, line)) out << "# " << line << "\n";
    }
    out.precision(17);
    out << "N " << sys.n_components() << "\nmasses";
    for (double mj : sys.masses().m) out << " " << mj;
    out << "\n";
    for (const Monomial& mono : sys.monomials()) {
        out << "monomial " << mono.target;
        for (const Factor& f : mono.factors) out << "  " << f.k << " " << f.l;
        out << "  " << mono.coeff.real() << " " << mono.coeff.imag() << "\n";
    }
}

}  // namespace dnls
