#include "divlab/zeta.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <sstream>
#include <tuple>

namespace divlab {

LaurentSeries::LaurentSeries(Rational center, int lo, std::vector<Real> coeff,
                             std::vector<Real> err)
    : center_(std::move(center)), lo_(lo), coeff_(std::move(coeff)), err_(std::move(err)) {
    if (coeff_.empty() || err_.size() != coeff_.size())
        throw ConfigError("Laurent series needs matching coefficient/error vectors");
}

LaurentSeries LaurentSeries::constant(const Rational& center, const Real& value, int top) {
    if (top < 0)
        throw ConfigError("Laurent constant needs top >= 0");
    std::vector<Real> c(top + 1, Real(0)), e(top + 1, Real(0));
    c[0] = value;
    return LaurentSeries(center, 0, std::move(c), std::move(e));
}

Real LaurentSeries::coeff(int order) const {
    if (order < lo_ || order > top())
        return Real(0);
    return coeff_[order - lo_];
}

Real LaurentSeries::error(int order) const {
    if (order < lo_ || order > top())
        return Real(0);
    return err_[order - lo_];
}

LaurentSeries LaurentSeries::rescaled(const Real& factor, const Rational& new_center) const {
    std::vector<Real> c(coeff_.size()), e(err_.size());
    for (std::size_t i = 0; i < coeff_.size(); ++i) {
        const int order = lo_ + static_cast<int>(i);
        const Real f = pow(factor, order);
        c[i] = coeff_[i] * f;
        e[i] = err_[i] * abs(f);
    }
    return LaurentSeries(new_center, lo_, std::move(c), std::move(e));
}

LaurentSeries operator+(const LaurentSeries& a, const LaurentSeries& b) {
    if (a.center_ != b.center_)
        throw ConfigError("Laurent addition requires a common center");
    const int lo = std::min(a.lo_, b.lo_);
    const int top = std::min(a.top(), b.top()); // validity ends where either operand does
    if (top < lo)
        throw ConfigError("Laurent addition has no common valid window");
    std::vector<Real> c(top - lo + 1), e(top - lo + 1);
    for (int o = lo; o <= top; ++o) {
        c[o - lo] = a.coeff(o) + b.coeff(o);
        e[o - lo] = a.error(o) + b.error(o);
    }
    return LaurentSeries(a.center_, lo, std::move(c), std::move(e));
}

LaurentSeries operator*(const LaurentSeries& a, const LaurentSeries& b) {
    if (a.center_ != b.center_)
        throw ConfigError("Laurent multiplication requires a common center");
    const int lo = a.lo_ + b.lo_;
    // coefficient of order t is complete only while every contributing pair
    // is inside both operands' windows
    const int top = std::min(a.lo_ + b.top(), b.lo_ + a.top());
    if (top < lo)
        throw ConfigError("Laurent multiplication has no valid window");
    std::vector<Real> c(top - lo + 1, Real(0)), e(top - lo + 1, Real(0));
    for (int i = a.lo_; i <= a.top(); ++i) {
        const Real ai = a.coeff(i), aei = a.error(i);
        for (int j = b.lo_; j <= b.top(); ++j) {
            const int t = i + j;
            if (t < lo || t > top)
                continue;
            const Real bj = b.coeff(j), bej = b.error(j);
            c[t - lo] += ai * bj;
            e[t - lo] += abs(ai) * bej + aei * abs(bj) + aei * bej;
        }
    }
    return LaurentSeries(a.center_, lo, std::move(c), std::move(e));
}

// ---------------------------------------------------------------------------
// Bernoulli numbers, exact rationals via sum_{j<n} C(n+1,j) B_j = -C(n+1,n) B_n.

const Rational& bernoulli_number(unsigned n) {
    static std::vector<Rational> cache{Rational(1), Rational(-1, 2)};
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    while (cache.size() <= n) {
        const unsigned m = static_cast<unsigned>(cache.size());
        if (m % 2 == 1) {
            cache.push_back(Rational(0));
            continue;
        }
        // B_m = -1/(m+1) * sum_{j=0}^{m-1} C(m+1, j) B_j
        Rational sum = 0;
        BigInt binom = 1; // C(m+1, 0)
        for (unsigned j = 0; j < m; ++j) {
            sum += Rational(binom) * cache[j];
            binom = binom * (m + 1 - j) / (j + 1);
        }
        cache.push_back(-sum / Rational(m + 1));
    }
    return cache[n];
}

// ---------------------------------------------------------------------------
// Euler-Maclaurin kernel in truncated power-series arithmetic over
// eps = w - w0. Polynomials are dense vectors c[0..order].

namespace {

using Poly = std::vector<Real>; // c[i] multiplies eps^i

void poly_add_scaled(Poly& acc, const Poly& p, const Real& scale) {
    for (std::size_t i = 0; i < acc.size() && i < p.size(); ++i)
        acc[i] += scale * p[i];
}

// exp(t * eps) truncated: coefficients t^i / i!
Poly exp_poly(const Real& t, int order) {
    Poly p(order + 1);
    p[0] = 1;
    for (int i = 1; i <= order; ++i)
        p[i] = p[i - 1] * t / i;
    return p;
}

// multiply in place by the linear factor (c + eps)
void poly_mul_linear(Poly& p, const Real& c) {
    for (std::size_t i = p.size(); i-- > 0;) {
        Real v = p[i] * c;
        if (i > 0)
            v += p[i - 1];
        p[i] = v;
    }
}

// 1/(c + eps) = (1/c) sum (-eps/c)^i, needs c != 0
Poly inv_linear_poly(const Real& c, int order) {
    Poly p(order + 1);
    Real cur = 1 / c;
    for (int i = 0; i <= order; ++i) {
        p[i] = cur;
        cur = -cur / c;
    }
    return p;
}

Poly poly_mul(const Poly& a, const Poly& b, int order) {
    Poly out(order + 1, Real(0));
    for (int i = 0; i <= order && i < static_cast<int>(a.size()); ++i)
        for (int j = 0; i + j <= order && j < static_cast<int>(b.size()); ++j)
            out[i + j] += a[i] * b[j];
    return out;
}

} // namespace

LaurentSeries zeta_laurent(const Rational& w0, int order, int digits,
                           const ZetaKernelConfig& cfg) {
    if (order < 0 || order > 30)
        throw ConfigError("zeta expansion order must be in [0, 30]");
    if (digits < 1)
        throw ConfigError("zeta precision must be positive");

    struct Key {
        Rational w0;
        int order;
        int digits;
        unsigned em, bp;
        bool operator<(const Key& o) const {
            return std::tie(w0, order, digits, em, bp) <
                   std::tie(o.w0, o.order, o.digits, o.em, o.bp);
        }
    };
    static std::map<Key, LaurentSeries> memo;
    static std::mutex memo_mu;
    const Key key{w0, order, digits, cfg.em_terms, cfg.bernoulli_pairs};
    {
        std::lock_guard<std::mutex> lock(memo_mu);
        auto it = memo.find(key);
        if (it != memo.end())
            return it->second;
    }

    const bool pole = (w0 == 1);
    const Real q = to_real(w0);
    const unsigned N = std::max(cfg.em_terms, 8u);
    const unsigned R = std::max(cfg.bernoulli_pairs, 4u);
    if (q <= -Real(2.0 * R + 1)) // continuation region of the formula
        throw ConfigError("zeta expansion point too far left for the configured depth");

    const Real logN = log(Real(N));

    // Regular part of the series: coefficients of eps^0..eps^order.
    Poly reg(order + 1, Real(0));
    // Principal part (pole case only): coefficient of eps^{-1} is exactly 1
    // after combining N^{1-s}/(s-1) = exp(-eps logN)/eps with the convention
    // below, handled separately.

    // 1) direct terms n = 1 .. N-1: n^{-q} exp(-eps log n)
    for (unsigned n = 1; n < N; ++n) {
        const Real logn = log(Real(n));
        const Real npow = exp(-q * logn);
        Poly e = exp_poly(-logn, order);
        poly_add_scaled(reg, e, npow);
    }

    // 2) boundary term N^{1-s}/(s-1)
    if (pole) {
        // N^{-eps}/eps: exp(-eps logN) shifted down one order. eps^{-1}
        // coefficient is 1; coefficients i >= 0 get (-logN)^{i+1}/(i+1)!.
        Poly e = exp_poly(-logN, order + 1);
        for (int i = 0; i <= order; ++i)
            reg[i] += e[i + 1];
    } else {
        const Real Npow = exp((Real(1) - q) * logN);
        Poly e = exp_poly(-logN, order);
        Poly inv = inv_linear_poly(q - 1, order);
        Poly t = poly_mul(e, inv, order);
        poly_add_scaled(reg, t, Npow);
    }

    // 3) + N^{-s}/2
    {
        const Real Npow = exp(-q * logN) / 2;
        Poly e = exp_poly(-logN, order);
        poly_add_scaled(reg, e, Npow);
    }

    // 4) Bernoulli corrections r = 1..R; the first omitted term (r = R+1)
    // gives the per-coefficient remainder bound (real s, so the remainder is
    // dominated by the next term; factor 4 covers the series-coefficient
    // version of that statement).
    Poly poch(order + 1, Real(0)); // (s)_{2r-1} with s = q + eps
    poch[0] = q;
    if (order >= 1)
        poch[1] = 1;
    Poly err_poly(order + 1, Real(0));
    const Poly expN = exp_poly(-logN, order);
    for (unsigned r = 1; r <= R + 1; ++r) {
        if (r > 1) {
            // (s)_{2r-1} = (s)_{2(r-1)-1} * (s + 2r - 3)(s + 2r - 2)
            poly_mul_linear(poch, q + Real(2 * r - 3));
            poly_mul_linear(poch, q + Real(2 * r - 2));
        }
        const Rational& b2r = bernoulli_number(2 * r);
        Real factorial = 1;
        for (unsigned i = 2; i <= 2 * r; ++i)
            factorial *= i;
        const Real scale = to_real(b2r) / factorial * exp((Real(1) - q - Real(2 * r)) * logN);
        Poly term = poly_mul(poch, expN, order);
        if (r <= R) {
            poly_add_scaled(reg, term, scale);
        } else {
            for (int i = 0; i <= order; ++i)
                err_poly[i] = 4 * abs(scale * term[i]);
        }
    }

    // Rounding slop: the working type carries ~100 digits.
    const Real ulp_slop = pow(Real(10), -90);
    std::vector<Real> coeff, err;
    int lo = pole ? -1 : 0;
    if (pole) {
        coeff.push_back(Real(1));
        err.push_back(Real(0));
    }
    for (int i = 0; i <= order; ++i) {
        coeff.push_back(reg[i]);
        err.push_back(err_poly[i] + (abs(reg[i]) + 1) * ulp_slop);
    }

    // Attainability check against the requested precision.
    const Real target = pow(Real(10), -digits);
    for (std::size_t i = 0; i < coeff.size(); ++i) {
        Real allowed = target * std::max(Real(1), abs(coeff[i]));
        if (err[i] > allowed) {
            std::ostringstream os;
            os << "zeta expansion at w0 = " << w0 << ": coefficient of order "
               << (lo + static_cast<int>(i)) << " only reaches error " << err[i].str(3)
               << ", requested 10^-" << digits
               << "; raise em_terms/bernoulli_pairs or lower the precision";
            throw NumericError(os.str());
        }
    }

    LaurentSeries out(w0, lo, std::move(coeff), std::move(err));
    {
        std::lock_guard<std::mutex> lock(memo_mu);
        memo.emplace(key, out);
    }
    return out;
}

Real zeta_value(const Rational& w0, int digits, const ZetaKernelConfig& cfg) {
    if (w0 == 1)
        throw ConfigError("zeta has a pole at 1");
    return zeta_laurent(w0, 0, digits, cfg).coeff(0);
}

Real stieltjes(unsigned m, int digits) {
    if (m > 28)
        throw ConfigError("stieltjes constants available up to gamma_28");
    // zeta(1+eps) = 1/eps + sum_m ((-1)^m/m!) gamma_m eps^m
    LaurentSeries z = zeta_laurent(Rational(1), static_cast<int>(std::min(m + 2, 30u)),
                                   digits);
    Real fact = 1;
    for (unsigned i = 2; i <= m; ++i)
        fact *= i;
    Real sign = (m % 2 == 0) ? 1 : -1;
    return sign * fact * z.coeff(static_cast<int>(m));
}

} // namespace divlab
