#pragma once

// Masses and cubic nonlinearities stored as sparse coefficient tables.
// A system  L_{m_j} u_j = F_j(u, du/dx)  is described by its component
// count, a mass vector and a list of cubic monomials; everything else
// (pointwise evaluation, the frequency symbol p_j) is derived from that.

#include <array>
#include <complex>
#include <span>
#include <string>
#include <vector>

namespace dnls {

using cplx = std::complex<double>;

// Coefficients below this magnitude are dropped during canonicalization.
inline constexpr double kCoeffZeroTol = 1e-14;

struct MassVector {
    std::vector<double> m;

    int size() const { return static_cast<int>(m.size()); }

    // Extended mass: m_k for k in 1..N, -m_{k-N} for k in N+1..2N.
    double extended(int k) const;
};

// One factor of a cubic monomial. k in 1..2N selects the field component,
// with k > N meaning the complex conjugate; l = 1 takes one x-derivative.
struct Factor {
    int k = 1;
    int l = 0;

    friend bool operator==(const Factor&, const Factor&) = default;
    friend auto operator<=>(const Factor&, const Factor&) = default;
};

struct Monomial {
    int target = 1;  // j in 1..N
    std::array<Factor, 3> factors{};
    cplx coeff{};

    friend bool operator==(const Monomial&, const Monomial&) = default;

    // +1 per unconjugated factor, -1 per conjugated one, for a given N.
    int gauge_weight(int n_components) const;
    // Number of derivative flags set (= degree in xi of the symbol term).
    int derivative_count() const;
    std::string to_string() const;
};

class CubicSystem {
public:
    CubicSystem() = default;
    CubicSystem(int n_components, MassVector masses,
                std::vector<Monomial> monomials);

    int n_components() const { return n_; }
    const MassVector& masses() const { return masses_; }
    const std::vector<Monomial>& monomials() const { return monomials_; }

    // Sorts factors and monomials, merges colliding monomials, drops
    // coefficients below kCoeffZeroTol. Idempotent.
    void canonicalize();

    // F_j(u, ux) evaluated at a single point. u and ux hold the N field
    // values and their x-derivatives.
    std::vector<cplx> evaluate_F(std::span<const cplx> u,
                                 std::span<const cplx> ux) const;

    // p_j(xi; Y): every derivative flag contributes a factor (i mt_k xi),
    // conjugated indices use conjugated Y entries.
    std::vector<cplx> symbol_p(double xi, std::span<const cplx> Y) const;

    // True when every monomial has gauge weight one, i.e. F(e^{i a} u)
    // = e^{i a} F(u).
    bool gauge_weight_one() const;

private:
    void validate() const;

    int n_ = 0;
    MassVector masses_;
    std::vector<Monomial> monomials_;
};

// Model file format (one directive per line, '#' starts a comment):
//   N <components>
//   masses <m_1> ... <m_N>
//   monomial <j> <k1> <l1> <k2> <l2> <k3> <l3> <Re C> <Im C>
CubicSystem parse_model(std::istream& in);
CubicSystem load_model(const std::string& path);
void save_model(const CubicSystem& sys, std::ostream& out,
                const std::string& header_comment = {});

}  // namespace dnls
