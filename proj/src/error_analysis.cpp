#include "divlab/error_analysis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>
#include <thread>

namespace divlab {

double delta_at(const DivisorTable& table, const MainTerm& M, double x) {
    if (!(x >= 1) || x > static_cast<double>(table.limit()))
        throw ConfigError("delta_at: x outside [1, N]");
    return table.summatory(x, SummatoryKind::D) - eval_main_term(M, x);
}

namespace {

// Gauss-Legendre nodes/weights on [-1, 1] by Newton iteration on P_n.
struct GaussRule {
    std::vector<double> node, weight;
};

GaussRule gauss_legendre(int n) {
    GaussRule r;
    r.node.resize(n);
    r.weight.resize(n);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1);
            }
            pp = n * (x * p0 - p1) / (x * x - 1.0);
            double dx = p0 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15)
                break;
        }
        r.node[i] = -x;
        r.node[n - 1 - i] = x;
        r.weight[i] = 2.0 / ((1.0 - x * x) * pp * pp);
        r.weight[n - 1 - i] = r.weight[i];
    }
    return r;
}

// integral over [a,b] of (D - H(x))^2 with both quadrature orders
struct IntervalResult {
    double main;
    double alt;
};

IntervalResult integrate_interval(const MainTerm& M, double D, double a, double b,
                                  const GaussRule& g1, const GaussRule& g2) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    IntervalResult out{0.0, 0.0};
    for (std::size_t i = 0; i < g1.node.size(); ++i) {
        const double diff = D - M.eval(c + h * g1.node[i]);
        out.main += g1.weight[i] * diff * diff;
    }
    for (std::size_t i = 0; i < g2.node.size(); ++i) {
        const double diff = D - M.eval(c + h * g2.node[i]);
        out.alt += g2.weight[i] * diff * diff;
    }
    out.main *= h;
    out.alt *= h;
    return out;
}

} // namespace

MeanSquareProfile mean_square(const DivisorTable& table, const MainTerm& M, double T,
                              const MeanSquareConfig& cfg) {
    if (!(T >= 1) || T > static_cast<double>(table.limit()))
        throw ConfigError("mean_square: T outside [1, N]");
    if (cfg.quad_order < 4 || cfg.quad_order > 16)
        throw ConfigError("mean_square: quad_order must be in [4, 16]");

    const ExponentTuple& a = table.tuple();
    MeanSquareProfile prof(a);
    prof.T = T;
    prof.quad_order = cfg.quad_order;
    const auto k = static_cast<long long>(a.k());
    prof.predicted_exponent_exact = Rational(1) + Rational(k - 1) / (2 * a.alpha());
    prof.predicted_exponent = to_double(prof.predicted_exponent_exact);

    // Checkpoints T/2^i, ascending.
    std::vector<double> marks;
    const int octaves = static_cast<int>(std::floor(std::log2(std::max(T, 1.0))));
    for (int i = std::max(octaves - 4, 0); i >= 0; --i)
        marks.push_back(T / std::pow(2.0, i));

    const GaussRule g1 = gauss_legendre(cfg.quad_order);
    const GaussRule g2 = gauss_legendre(std::max(4, cfg.quad_order / 2));

    // Fixed chunking over unit intervals keeps the reduction order (and so
    // the compensated sums) identical for any worker count.
    const std::uint64_t last_m = static_cast<std::uint64_t>(std::ceil(T)) - 1; // [m, m+1)
    const std::uint64_t chunk = 1u << 16;
    const std::uint64_t nchunks = last_m == 0 ? 0 : (last_m - 1) / chunk + 1;

    struct ChunkOut {
        CompensatedSum v, alt;
        std::vector<double> at_marks; // partial integral up to each mark inside the chunk
        std::vector<std::size_t> mark_ids;
    };
    std::vector<ChunkOut> outs(nchunks);

    auto run_chunk = [&](std::uint64_t ci) {
        ChunkOut& out = outs[ci];
        const std::uint64_t m0 = 1 + ci * chunk;
        const std::uint64_t m1 = std::min(last_m, m0 + chunk - 1);
        for (std::uint64_t m = m0; m <= m1; ++m) {
            const double lo = static_cast<double>(m);
            const double hi = std::min(static_cast<double>(m + 1), T);
            const double D = static_cast<double>(table.prefix_d(m));
            // split at any checkpoint falling inside [lo, hi)
            double seg_lo = lo;
            for (std::size_t mi = 0; mi < marks.size(); ++mi) {
                const double mk = marks[mi];
                if (mk > seg_lo && mk < hi) {
                    if (mk > seg_lo) {
                        IntervalResult r = integrate_interval(M, D, seg_lo, mk, g1, g2);
                        out.v.add(r.main);
                        out.alt.add(std::abs(r.main - r.alt));
                        seg_lo = mk;
                    }
                    out.at_marks.push_back(out.v.value());
                    out.mark_ids.push_back(mi);
                } else if (mk == seg_lo && mk == lo) {
                    // checkpoint exactly at an interval boundary
                    out.at_marks.push_back(out.v.value());
                    out.mark_ids.push_back(mi);
                }
            }
            if (hi > seg_lo) {
                IntervalResult r = integrate_interval(M, D, seg_lo, hi, g1, g2);
                out.v.add(r.main);
                out.alt.add(std::abs(r.main - r.alt));
            }
        }
    };

    const unsigned workers = std::max(1u, cfg.threads);
    if (workers == 1 || nchunks <= 1) {
        for (std::uint64_t ci = 0; ci < nchunks; ++ci)
            run_chunk(ci);
    } else {
        std::atomic<std::uint64_t> next{0};
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < std::min<std::uint64_t>(workers, nchunks); ++w)
            pool.emplace_back([&] {
                for (std::uint64_t ci; (ci = next.fetch_add(1)) < nchunks;)
                    run_chunk(ci);
            });
        for (auto& th : pool)
            th.join();
    }

    // Serial reduction in chunk order.
    CompensatedSum total, alt_total;
    std::vector<double> v_at_mark(marks.size(), -1.0);
    for (std::uint64_t ci = 0; ci < nchunks; ++ci) {
        const ChunkOut& out = outs[ci];
        for (std::size_t i = 0; i < out.mark_ids.size(); ++i)
            v_at_mark[out.mark_ids[i]] = total.value() + out.at_marks[i];
        total.add(out.v);
        alt_total.add(out.alt);
    }
    // the final checkpoint is T itself
    if (!marks.empty())
        v_at_mark.back() = total.value();

    for (std::size_t i = 0; i < marks.size(); ++i) {
        MeanSquareCheckpoint cp;
        cp.T = marks[i];
        cp.V = v_at_mark[i] < 0 ? 0.0 : v_at_mark[i];
        cp.ratio = cp.V / std::pow(cp.T, prof.predicted_exponent);
        prof.checkpoints.push_back(cp);
    }

    prof.quad_error_estimate = alt_total.value();
    prof.quad_warning =
        prof.quad_error_estimate > cfg.quad_tol_rel * std::max(total.value(), 1.0);

    // Known closed form for the all-ones pair: zeta^4(3/2) / (6 pi^2 zeta(3)).
    if (a.values() == std::vector<std::uint32_t>{1, 1}) {
        const Real z32 = zeta_value(Rational(3, 2));
        const Real z3 = zeta_value(Rational(3));
        prof.predicted_constant =
            to_double(pow(z32, 4) / (6 * pi_real() * pi_real() * z3));
    }
    return prof;
}

PowerLawFit fit_power_law(const MeanSquareProfile& profile) {
    const auto& cps = profile.checkpoints;
    if (cps.size() < 5)
        throw ConfigError("fit_power_law: need at least 5 checkpoints");
    for (const auto& cp : cps)
        if (!(cp.V > 0))
            throw NumericError("fit_power_law: V = 0 at a checkpoint, fit degenerate");

    PowerLawFit fit;
    for (const auto& cp : cps)
        fit.ratios.push_back(cp.ratio);
    fit.ratio_at_T = cps.back().ratio;

    // drop the lowest four octaves (transient), keep at least 5 points
    std::size_t drop = std::min<std::size_t>(4, cps.size() - 5);
    fit.used.assign(cps.begin() + drop, cps.end());

    const std::size_t n = fit.used.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& cp : fit.used) {
        const double x = std::log(cp.T), y = std::log(cp.V);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double denom = n * sxx - sx * sx;
    if (denom == 0)
        throw NumericError("fit_power_law: degenerate abscissas");
    fit.slope = (n * sxy - sx * sy) / denom;
    const double intercept = (sy - fit.slope * sx) / n;
    fit.constant = std::exp(intercept);

    double rss = 0;
    for (const auto& cp : fit.used) {
        const double e = std::log(cp.V) - (fit.slope * std::log(cp.T) + intercept);
        rss += e * e;
    }
    const double s2 = n > 2 ? rss / (n - 2) : 0.0;
    fit.slope_stderr = std::sqrt(s2 * n / denom);
    fit.intercept_stderr = std::sqrt(s2 * sxx / denom);
    return fit;
}

} // namespace divlab
