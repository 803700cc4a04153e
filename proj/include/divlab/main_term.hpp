#pragma once

#include <vector>

#include "divlab/exponent.hpp"
#include "divlab/zeta.hpp"

namespace divlab {

struct MainTermPiece {
    Rational exponent;           // 1/a for one distinct exponent value a
    std::vector<Real> logpoly;   // p_0..p_{m-1}: coefficient of log^i x
    std::vector<Real> coeff_err; // absolute bounds on the p_i
};

struct MainTermConfig {
    int digits = 50;     // precision demanded of each coefficient
    int extra_order = 8; // expansion margin beyond the pole multiplicity
    ZetaKernelConfig zeta{};
};

/// H(a;x) as sum over distinct exponent values a* of x^{1/a*} times a
/// polynomial in log x, from the residues of prod_j zeta(a_j s) x^s/s at
/// s = 1/a*. The residue at s = 0 is excluded; its value (-1/2)^k is kept
/// as a diagnostic.
class MainTerm {
  public:
    MainTerm(ExponentTuple a, std::vector<MainTermPiece> pieces, Real excluded, int digits);

    const ExponentTuple& tuple() const { return a_; }
    const std::vector<MainTermPiece>& pieces() const { return pieces_; } // exponent descending
    Real excluded_constant() const { return excluded_; }
    int precision_digits() const { return digits_; }

    Real eval_real(const Real& x) const;
    /// Double fast path over pre-rounded coefficients, for quadrature loops.
    double eval(double x) const;

  private:
    ExponentTuple a_;
    std::vector<MainTermPiece> pieces_;
    Real excluded_;
    int digits_;

    struct Compiled {
        double expo;
        std::vector<double> poly;
    };
    std::vector<Compiled> compiled_;
};

MainTerm compute_main_term(const ExponentTuple& a, const MainTermConfig& cfg = {});

/// The high-precision evaluation rounded to working float.
double eval_main_term(const MainTerm& M, double x);

} // namespace divlab
