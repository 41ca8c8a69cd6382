#pragma once

// Structural condition checkers: mass resonance, gauge invariance,
// dissipativity of the symbol against a positive Hermitian form, exact
// vanishing of the symbol, and a diagonal certificate search.

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dnls/model.hpp"

namespace dnls {

// Positive Hermitian matrix with cached extreme eigenvalues.
class HermitianForm {
public:
    explicit HermitianForm(Eigen::MatrixXcd entries);

    static HermitianForm identity(int n);
    static HermitianForm diagonal(const std::vector<double>& d);

    const Eigen::MatrixXcd& entries() const { return a_; }
    int size() const { return static_cast<int>(a_.rows()); }
    double kappa_min() const { return kappa_min_; }
    double kappa_max() const { return kappa_max_; }

    HermitianForm scaled(double c) const { return HermitianForm(c * a_); }

private:
    Eigen::MatrixXcd a_;
    double kappa_min_ = 0.0;
    double kappa_max_ = 0.0;
};

HermitianForm load_hermitian(const std::string& path);

// <p(xi;Y), A Y> with <z,w> = sum z_j conj(w_j).
cplx quartic_form(const CubicSystem& sys, const HermitianForm& A, double xi,
                  std::span<const cplx> Y);

struct SamplePlan {
    std::vector<double> xi_samples;
    int sphere_samples = 2000;
    std::uint64_t seed = 1;

    // Compactified grid xi = tan(theta) on a uniform open theta-grid.
    static SamplePlan standard(int xi_points = 201, int sphere_samples = 2000,
                               std::uint64_t seed = 1);
};

enum class Verdict { HoldsExactly, HoldsOnSamples, Violated };

std::string to_string(Verdict v);

struct SampleWitness {
    double xi = 0.0;
    std::vector<cplx> Y;
    double value = 0.0;  // normalized form g at the witness
};

enum class DissipLevel { B0, B1, B2 };

struct ConditionReport {
    std::string condition;  // "a", "gauge", "b0", "b1", "b2", "b3"
    Verdict verdict = Verdict::Violated;
    std::vector<Monomial> offending;          // (a), gauge, b3
    std::optional<SampleWitness> witness;     // b0/b1/b2 violations
    std::optional<double> constant;           // estimated C_* or C_**
    double margin = 0.0;                      // -sup g over the samples
    std::optional<HermitianForm> matrix;
    std::string detail;

    bool holds() const { return verdict != Verdict::Violated; }
};

// Every monomial whose resonance sum mt_{k1}+mt_{k2}+mt_{k3} differs from
// the target mass must carry a zero coefficient.
ConditionReport check_condition_a(const CubicSystem& sys);

// N = 1 only: every monomial has gauge weight one.
ConditionReport check_gauge_invariance(const CubicSystem& sys);

// Samples g(xi,Y) = Im<p,AY> / (w(xi) |Y|^4) on |Y| = 1 and additionally
// tests the xi -> +-inf leading coefficients, so polynomial blowup in xi
// cannot hide between samples.
ConditionReport check_dissipativity(const CubicSystem& sys,
                                    const HermitianForm& A,
                                    const SamplePlan& plan, DissipLevel level);

// Exact vanishing of the symbol, decided on the collapsed polynomial
// coefficients (degree <= 3 in xi, indexed by canonical Y-monomials).
ConditionReport check_b3_exact(const CubicSystem& sys);

// Grid-plus-refinement search over positive diagonal A with A_11 = 1.
std::optional<HermitianForm> search_diagonal_A(const CubicSystem& sys,
                                               const SamplePlan& plan,
                                               DissipLevel level);

std::string format_report(const ConditionReport& report);

}  // namespace dnls
