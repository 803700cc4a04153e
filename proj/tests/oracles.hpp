// Test-only oracles, independent of the library paths they check.
#pragma once

#include <cstdint>
#include <vector>

#include "divlab/numeric.hpp"
#include "divlab/exponent.hpp"

namespace divlab::testing {

struct BruteTables {
    std::vector<std::uint64_t> d, dhat, c; // 1-based
};

// Exhaustive enumeration of ordered tuples with prod n_j^{a_j} = n <= N.
inline BruteTables brute_tables(const ExponentTuple& a, std::uint64_t N) {
    BruteTables t;
    t.d.assign(N + 1, 0);
    t.dhat.assign(N + 1, 0);
    t.c.assign(N + 1, 0);

    // depth-first over coordinates
    auto rec = [&](auto&& self, std::size_t j, std::uint64_t prod, std::uint64_t what,
                   std::uint64_t wc) -> void {
        if (j == a.k()) {
            t.d[prod] += 1;
            t.dhat[prod] += what;
            t.c[prod] += wc;
            return;
        }
        const std::uint32_t aj = a[j];
        for (std::uint64_t nj = 1;; ++nj) {
            std::uint64_t p = 1;
            bool over = false;
            for (std::uint32_t i = 0; i < aj; ++i) {
                if (p > N / nj) { over = true; break; }
                p *= nj;
            }
            if (over || p > N / prod)
                break;
            std::uint64_t wh = 1, wcc = 1;
            for (std::uint32_t i = 0; i + 1 < aj; ++i)
                wh *= nj;
            wcc = wh * wh;
            self(self, j + 1, prod * p, what * wh, wc * wcc);
        }
    };
    rec(rec, 0, 1, 1, 1);
    return t;
}

// Alternating-series zeta for real s > 0, s != 1 (P. Borwein's algorithm).
// Error decays like (3 + sqrt(8))^{-n}; n = 170 reaches far below 1e-100.
inline Real borwein_zeta(const Real& s, int n = 170) {
    // d_k = n * sum_{i=0}^{k} (n+i-1)! 4^i / ((n-i)! (2i)!), built from the
    // term ratio; t_0 = (n-1)!/n! = 1/n.
    std::vector<Real> d(n + 1);
    Real t = Real(1) / n;
    Real acc = t;
    d[0] = Real(n) * acc;
    for (int i = 1; i <= n; ++i) {
        // t_i / t_{i-1} = 4 (n+i-1)(n-i+1) / ((2i)(2i-1))
        t *= Real(4) * (n + i - 1) * (n - i + 1) / (Real(2 * i) * (2 * i - 1));
        acc += t;
        d[i] = Real(n) * acc;
    }
    Real sum = 0;
    for (int k = 0; k < n; ++k) {
        const Real term_k = (d[k] - d[n]) * pow(Real(k + 1), -s);
        sum += (k % 2 == 0) ? term_k : -term_k;
    }
    return -sum / (d[n] * (Real(1) - pow(Real(2), 1 - s)));
}

// Stieltjes constants through the eta function: accelerated alternating sums
// of log^m(n)/n give the Taylor coefficients of eta at 1, and
// zeta(1+eps) = eta(1+eps) / (1 - 2^{-eps}) is expanded by hand.
// Independent of the Euler-Maclaurin kernel.
inline std::vector<Real> stieltjes_via_eta(int count, int n = 400) {
    const int ord = count; // need coefficients eps^0..eps^{count-1}; carry margin
    const int m_top = ord + 1;

    // Cohen-Villegas-Zagier weights: same d_k as above.
    std::vector<Real> d(n + 1);
    Real t = Real(1) / n;
    Real acc = t;
    d[0] = Real(n) * acc;
    for (int i = 1; i <= n; ++i) {
        t *= Real(4) * (n + i - 1) * (n - i + 1) / (Real(2 * i) * (2 * i - 1));
        acc += t;
        d[i] = Real(n) * acc;
    }

    // eta(s) = sum_{k>=1} (-1)^{k-1} k^{-s}; the m-th derivative at 1 is the
    // accelerated alternating sum of (-log k)^m / k.
    std::vector<Real> eta_taylor(m_top + 1); // eta^{(m)}(1)/m!
    Real mfact = 1;
    for (int m = 0; m <= m_top; ++m) {
        if (m > 0)
            mfact *= m;
        Real em = 0;
        for (int k = 0; k < n; ++k) {
            const Real lg = log(Real(k + 1));
            const Real term = (d[k] - d[n]) * pow(-lg, m) / (k + 1);
            em += (k % 2 == 0) ? term : -term;
        }
        em = -em / d[n];
        eta_taylor[m] = em / mfact;
    }

    // B(eps) = (1 - 2^{-eps})/eps: B[i] = (-1)^i log(2)^{i+1} / (i+1)!
    std::vector<Real> B(m_top + 1);
    const Real l2 = log(Real(2));
    Real lp = l2;
    Real f = 1;
    for (int i = 0; i <= m_top; ++i) {
        f *= (i + 1);
        B[i] = ((i % 2 == 0) ? Real(1) : Real(-1)) * lp / f;
        lp *= l2;
    }

    // 1/B by series inversion, then zeta(1+eps) = eta * (1/B) / eps.
    std::vector<Real> invB(m_top + 1);
    invB[0] = 1 / B[0];
    for (int i = 1; i <= m_top; ++i) {
        Real s = 0;
        for (int j = 1; j <= i; ++j)
            s += B[j] * invB[i - j];
        invB[i] = -s / B[0];
    }
    std::vector<Real> prod(m_top + 1, Real(0)); // eta(1+eps) * invB(eps)
    for (int i = 0; i <= m_top; ++i)
        for (int j = 0; i + j <= m_top; ++j)
            prod[i + j] += eta_taylor[i] * invB[j];

    // zeta(1+eps) = prod(eps)/eps = 1/eps + sum_{m>=0} prod[m+1] eps^m,
    // and the coefficient of eps^m is (-1)^m gamma_m / m!.
    std::vector<Real> out(count);
    Real fac = 1;
    for (int m = 0; m < count; ++m) {
        if (m > 0)
            fac *= m;
        out[m] = ((m % 2 == 0) ? Real(1) : Real(-1)) * fac * prod[m + 1];
    }
    return out;
}

} // namespace divlab::testing
