#pragma once

#include <vector>

#include "divlab/errors.hpp"
#include "divlab/numeric.hpp"

namespace divlab {

/// Truncated Laurent expansion around a rational center. coeff(i) holds the
/// coefficient of (s - center)^i for i in [lo, top]; error(i) is an absolute
/// bound on it. Orders above top are unknown (truncated), orders below lo
/// are exactly zero.
class LaurentSeries {
  public:
    LaurentSeries(Rational center, int lo, std::vector<Real> coeff, std::vector<Real> err);

    static LaurentSeries constant(const Rational& center, const Real& value, int top);

    const Rational& center() const { return center_; }
    int lo() const { return lo_; }
    int top() const { return lo_ + static_cast<int>(coeff_.size()) - 1; }

    Real coeff(int order) const;
    Real error(int order) const;
    Real residue() const { return coeff(-1); }
    Real residue_error() const { return error(-1); }

    /// Substitute (w - w0) = factor * (s - s0): coefficients of order i pick
    /// up factor^i and the center moves to s0.
    LaurentSeries rescaled(const Real& factor, const Rational& new_center) const;

    friend LaurentSeries operator+(const LaurentSeries& a, const LaurentSeries& b);
    friend LaurentSeries operator*(const LaurentSeries& a, const LaurentSeries& b);

  private:
    Rational center_;
    int lo_;
    std::vector<Real> coeff_;
    std::vector<Real> err_;
};

struct ZetaKernelConfig {
    unsigned em_terms = 200;       // direct-sum cutoff of the Euler-Maclaurin formula
    unsigned bernoulli_pairs = 40; // number of B_{2r} correction terms

    bool operator==(const ZetaKernelConfig&) const = default;
};

/// Expansion of zeta(w) around rational w0 up to (w - w0)^order.
/// w0 = 1 gives the Laurent series 1/(w-1) + sum ((-1)^m/m!) gamma_m (w-1)^m;
/// any other real w0 > -2R gives the Taylor series by the analytic
/// continuation of the same Euler-Maclaurin formula. Throws NumericError
/// when the per-coefficient remainder bounds exceed 10^-digits.
LaurentSeries zeta_laurent(const Rational& w0, int order, int digits = 50,
                           const ZetaKernelConfig& cfg = {});

Real zeta_value(const Rational& w0, int digits = 50, const ZetaKernelConfig& cfg = {});

/// Stieltjes constant gamma_m (gamma_0 is Euler's constant). Memoized.
Real stieltjes(unsigned m, int digits = 50);

/// Exact Bernoulli number B_n via the classical recurrence (B_1 = -1/2).
const Rational& bernoulli_number(unsigned n);

} // namespace divlab
