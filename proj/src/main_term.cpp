#include "divlab/main_term.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace divlab {

MainTerm::MainTerm(ExponentTuple a, std::vector<MainTermPiece> pieces, Real excluded,
                   int digits)
    : a_(std::move(a)), pieces_(std::move(pieces)), excluded_(std::move(excluded)),
      digits_(digits) {
    std::sort(pieces_.begin(), pieces_.end(),
              [](const MainTermPiece& l, const MainTermPiece& r) {
                  return l.exponent > r.exponent;
              });
    compiled_.reserve(pieces_.size());
    for (const auto& p : pieces_) {
        Compiled c;
        c.expo = to_double(p.exponent);
        for (const auto& v : p.logpoly)
            c.poly.push_back(to_double(v));
        compiled_.push_back(std::move(c));
    }
}

Real MainTerm::eval_real(const Real& x) const {
    if (x < 1)
        throw ConfigError("main term evaluated below x = 1");
    const Real lx = log(x);
    Real total = 0;
    for (const auto& p : pieces_) {
        Real poly = 0;
        for (std::size_t i = p.logpoly.size(); i-- > 0;)
            poly = poly * lx + p.logpoly[i];
        total += pow(x, to_real(p.exponent)) * poly;
    }
    return total;
}

double MainTerm::eval(double x) const {
    const double lx = std::log(x);
    double total = 0;
    for (const auto& c : compiled_) {
        double poly = 0;
        for (std::size_t i = c.poly.size(); i-- > 0;)
            poly = poly * lx + c.poly[i];
        total += std::pow(x, c.expo) * poly;
    }
    return total;
}

double eval_main_term(const MainTerm& M, double x) {
    return to_double(M.eval_real(Real(x)));
}

MainTerm compute_main_term(const ExponentTuple& a, const MainTermConfig& cfg) {
    // distinct exponent values with multiplicities (tuple is sorted)
    std::map<std::uint32_t, int> mult;
    for (std::size_t j = 0; j < a.k(); ++j)
        mult[a[j]]++;

    std::vector<MainTermPiece> pieces;
    for (const auto& [astar, m] : mult) {
        const Rational s0(1, astar);
        // Expansion order: each of the k factors costs one order of validity
        // in the product, and the residue needs orders down to -m; the margin
        // supports the truncation self-consistency check. A fixed bucket
        // keeps the zeta memo hot across tuples.
        const int order =
            std::max({m - 1 + cfg.extra_order, static_cast<int>(a.k()) + cfg.extra_order, 12});

        // Z(eps) = prod_j zeta(a_j (s0 + eps)), as a Laurent series in eps.
        LaurentSeries Z = LaurentSeries::constant(s0, Real(1), order);
        for (std::size_t j = 0; j < a.k(); ++j) {
            const Rational w0 = Rational(a[j]) * s0; // a_j / a*
            LaurentSeries factor =
                zeta_laurent(w0, order, cfg.digits, cfg.zeta).rescaled(Real(a[j]), s0);
            Z = Z * factor;
        }

        // Multiply by x^s/s = x^{s0} e^{eps log x} / (s0 + eps) and take the
        // eps^{-1} coefficient. With e^{eps L}/(s0+eps) = sum_i eps^i
        // sum_{p<=i} L^p/p! (-1)^{i-p} s0^{-(i-p+1)}, the log^d x coefficient
        // of the residue is
        //   p_d = (1/d!) sum_{i=d}^{m-1} Z_{-1-i} (-1)^{i-d} a*^{i-d+1}.
        MainTermPiece piece;
        piece.exponent = s0;
        const Real astar_r(astar);
        Real dfact = 1;
        for (int d = 0; d < m; ++d) {
            if (d > 0)
                dfact *= d;
            Real pd = 0, pe = 0;
            Real apow = astar_r; // a*^{i-d+1}
            Real sign = 1;
            for (int i = d; i < m; ++i) {
                pd += sign * Z.coeff(-1 - i) * apow;
                pe += Z.error(-1 - i) * apow;
                apow *= astar_r;
                sign = -sign;
            }
            piece.logpoly.push_back(pd / dfact);
            piece.coeff_err.push_back(pe / dfact);
        }

        const Real target = pow(Real(10), -cfg.digits);
        for (std::size_t i = 0; i < piece.logpoly.size(); ++i) {
            if (piece.coeff_err[i] > target * std::max(Real(1), abs(piece.logpoly[i]))) {
                std::ostringstream os;
                os << "main term coefficient log^" << i << " at exponent 1/" << astar
                   << " reaches only error " << piece.coeff_err[i].str(3) << ", requested 10^-"
                   << cfg.digits;
                throw NumericError(os.str());
            }
        }
        pieces.push_back(std::move(piece));
    }

    // Residue at s = 0 (excluded from H): prod zeta(0) = (-1/2)^k.
    Real excluded = pow(Real(-1) / 2, static_cast<int>(a.k()));
    return MainTerm(a, std::move(pieces), excluded, cfg.digits);
}

} // namespace divlab
