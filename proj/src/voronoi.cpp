#include "divlab/voronoi.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace divlab {

double eval_truncated(const TruncatedSeriesParams& p, const DivisorTable& table, double y) {
    if (p.m_prime < 1)
        throw ConfigError("eval_truncated: M' must be >= 1");
    if (p.m_prime > table.limit())
        throw ConfigError("eval_truncated: M' exceeds the table limit");
    if (!(y >= 1))
        throw ConfigError("eval_truncated: y must be >= 1");

    const DerivedConstants dc = derive_constants(p.a);
    const double theta0 = to_double(dc.theta0);
    const double inv2a = 1.0 / to_double(2 * dc.alpha);
    const double u = std::pow(y, inv2a);
    const double ph = p.phase * M_PI;

    CompensatedSum s;
    for (std::uint64_t n = 1; n <= p.m_prime; ++n) {
        const double dh = static_cast<double>(table.dhat(n));
        if (dh == 0.0)
            continue;
        const double w = dh * std::pow(static_cast<double>(n), theta0 - 1.0);
        s.add(w * std::cos(p.omega * u * std::pow(static_cast<double>(n), inv2a) + ph));
    }
    return p.kappa * std::pow(y, theta0) * s.value();
}

std::vector<double> sample_points(const ExponentTuple& a, double y1, double y2,
                                  std::size_t samples) {
    if (!(y1 >= 1) || !(y2 > y1))
        throw ConfigError("sample window must satisfy 1 <= y1 < y2");
    if (samples < 2)
        throw ConfigError("need at least 2 samples");
    const double inv2a = 1.0 / to_double(2 * a.alpha());
    const double u1 = std::pow(y1, inv2a), u2 = std::pow(y2, inv2a);
    std::vector<double> ys;
    ys.reserve(samples);
    double last = 0;
    for (std::size_t i = 0; i < samples; ++i) {
        const double u = u1 + (u2 - u1) * static_cast<double>(i) / (samples - 1);
        // snap to the half-integer grid: measure-zero halving convention
        double y = std::floor(std::pow(u, 1.0 / inv2a)) + 0.5;
        y = std::min(std::max(y, std::floor(y1) + 0.5), std::floor(y2) - 0.5);
        if (y != last) {
            ys.push_back(y);
            last = y;
        }
    }
    if (ys.size() < 2)
        throw ConfigError("sample window too narrow for distinct half-integer points");
    return ys;
}

namespace {

struct Regressors {
    std::vector<double> c, s; // per-sample model components at unit amplitude
};

// C_i = sum_n w_n cos(omega n^{1/2a} u_i), S_i likewise with sin.
Regressors build_regressors(const DivisorTable& table, std::uint64_t terms, double omega,
                            double theta0, double inv2a, std::span<const double> u) {
    Regressors r;
    r.c.assign(u.size(), 0.0);
    r.s.assign(u.size(), 0.0);
    for (std::uint64_t n = 1; n <= terms; ++n) {
        const double dh = static_cast<double>(table.dhat(n));
        if (dh == 0.0)
            continue;
        const double w = dh * std::pow(static_cast<double>(n), theta0 - 1.0);
        const double f = omega * std::pow(static_cast<double>(n), inv2a);
        for (std::size_t i = 0; i < u.size(); ++i) {
            r.c[i] += w * std::cos(f * u[i]);
            r.s[i] += w * std::sin(f * u[i]);
        }
    }
    return r;
}

struct LinFit {
    double A, B; // model A*C_i - B*S_i
    double ssr;
};

// least squares for z_i ~ A C_i - B S_i (cos(x+p) = cos x cos p - sin x sin p)
LinFit fit_linear(std::span<const double> z, const Regressors& r) {
    double cc = 0, ss = 0, cs = 0, zc = 0, zs = 0, zz = 0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        cc += r.c[i] * r.c[i];
        ss += r.s[i] * r.s[i];
        cs += r.c[i] * r.s[i];
        zc += z[i] * r.c[i];
        zs += z[i] * r.s[i];
        zz += z[i] * z[i];
    }
    const double det = cc * ss - cs * cs;
    LinFit f{0.0, 0.0, zz};
    if (det <= 0 || !std::isfinite(det))
        return f;
    // minimize sum (z - (A c - B s))^2
    f.A = (zc * ss - zs * cs) / det;
    f.B = (cs * zc - cc * zs) / det;
    f.ssr = 0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        const double e = z[i] - (f.A * r.c[i] - f.B * r.s[i]);
        f.ssr += e * e;
    }
    return f;
}

} // namespace

CalibrationResult calibrate_samples(const ExponentTuple& a, const DivisorTable& table,
                                    std::span<const double> y,
                                    std::span<const double> delta,
                                    std::uint64_t m_prime, const CalibrationConfig& cfg) {
    if (y.size() != delta.size() || y.size() < 16)
        throw ConfigError("calibrate: need matching y/delta samples, at least 16");
    if (m_prime < 1 || m_prime > table.limit())
        throw ConfigError("calibrate: M' outside [1, N]");

    const DerivedConstants dc = derive_constants(a);
    const double theta0 = to_double(dc.theta0);
    const double inv2a = 1.0 / to_double(2 * dc.alpha);
    const double nominal = to_double(dc.h) * M_PI;

    // normalize out the y^theta0 envelope and remove the mean
    std::vector<double> u(y.size()), z(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        u[i] = std::pow(y[i], inv2a);
        z[i] = delta[i] / std::pow(y[i], theta0);
    }
    const double mean = std::accumulate(z.begin(), z.end(), 0.0) / z.size();
    for (auto& v : z)
        v -= mean;

    // (i) periodogram over the search band
    const double span = u.back() - u.front();
    if (!(span > 0))
        throw ConfigError("calibrate: degenerate u span");
    const double dw = 2.0 * M_PI / (span * cfg.oversample);
    const double w_lo = cfg.band_lo * nominal, w_hi = cfg.band_hi * nominal;
    std::vector<double> power;
    std::vector<double> freq;
    for (double w = w_lo; w <= w_hi; w += dw) {
        double cs = 0, sn = 0;
        for (std::size_t i = 0; i < u.size(); ++i) {
            cs += z[i] * std::cos(w * u[i]);
            sn += z[i] * std::sin(w * u[i]);
        }
        freq.push_back(w);
        power.push_back(cs * cs + sn * sn);
    }
    std::vector<double> sorted = power;
    std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
    const double median = sorted[sorted.size() / 2];
    const double global_max = *std::max_element(power.begin(), power.end());
    const double floor_power =
        std::max(cfg.peak_floor * median, cfg.first_peak_fraction * global_max);

    // fundamental = lowest significant local maximum (higher harmonics of the
    // n-ladder can carry more power than n = 1)
    std::size_t peak = power.size();
    for (std::size_t i = 1; i + 1 < power.size(); ++i) {
        if (power[i] >= power[i - 1] && power[i] >= power[i + 1] && power[i] >= floor_power) {
            peak = i;
            break;
        }
    }
    if (peak == power.size() || global_max < cfg.peak_floor * median) {
        std::ostringstream os;
        os << "calibration failed: no significant periodogram peak (max/median = "
           << (median > 0 ? global_max / median : 0.0) << ")";
        throw NumericError(os.str());
    }
    // parabolic refinement around the bin
    double w_peak = freq[peak];
    {
        const double pm = power[peak - 1], p0 = power[peak], pp = power[peak + 1];
        const double d = pm - 2 * p0 + pp;
        if (d < 0)
            w_peak += 0.5 * dw * (pm - pp) / d;
    }

    // (ii) linear fit of (cos, sin) amplitudes; polish omega on a truncated
    // model first, then once against the full M'-term model.
    const std::uint64_t terms_coarse = std::min<std::uint64_t>(cfg.refine_terms, m_prime);
    auto ssr_at = [&](double w, std::uint64_t terms) {
        Regressors r = build_regressors(table, terms, w, theta0, inv2a, u);
        return fit_linear(z, r).ssr;
    };
    double best_w = w_peak, best_ssr = ssr_at(w_peak, terms_coarse);
    for (int pass = 0; pass < 2; ++pass) {
        const double radius = (pass == 0) ? dw : dw / 25.0;
        const int steps = 25;
        for (int i = -steps; i <= steps; ++i) {
            const double w = best_w + radius * i / steps;
            if (w <= 0)
                continue;
            const double ssr = ssr_at(w, terms_coarse);
            if (ssr < best_ssr) {
                best_ssr = ssr;
                best_w = w;
            }
        }
    }
    // golden-section polish against the full model
    {
        const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
        double lo = best_w - dw / 25.0, hi = best_w + dw / 25.0;
        double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
        double f1 = ssr_at(x1, m_prime), f2 = ssr_at(x2, m_prime);
        for (int it = 0; it < 18; ++it) {
            if (f1 < f2) {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - gr * (hi - lo);
                f1 = ssr_at(x1, m_prime);
            } else {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + gr * (hi - lo);
                f2 = ssr_at(x2, m_prime);
            }
        }
        best_w = 0.5 * (lo + hi);
    }

    Regressors r = build_regressors(table, m_prime, best_w, theta0, inv2a, u);
    LinFit lf = fit_linear(z, r);

    CalibrationResult out(a);
    out.params.m_prime = m_prime;
    out.params.omega = best_w;
    out.params.kappa = std::hypot(lf.A, lf.B);
    out.params.phase = std::atan2(lf.B, lf.A) / M_PI;
    if (out.params.kappa == 0.0)
        throw NumericError("calibration failed: zero fitted amplitude");
    out.nominal_omega = nominal;
    out.omega_ratio = best_w / nominal;
    out.periodogram_peak = global_max;
    out.periodogram_median = median;

    // residual in Delta units: model is y^theta0 * (A c - B s)
    double ms_delta = 0, ms_resid = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double env = std::pow(y[i], theta0);
        const double model = env * (lf.A * r.c[i] - lf.B * r.s[i]);
        ms_delta += delta[i] * delta[i];
        const double e = delta[i] - model;
        ms_resid += e * e;
    }
    out.residual_ratio = ms_delta > 0 ? ms_resid / ms_delta : 0.0;
    return out;
}

CalibrationResult calibrate(const ExponentTuple& a, const DivisorTable& table,
                            const MainTerm& M, double y1, double y2,
                            std::uint64_t m_prime, const CalibrationConfig& cfg) {
    if (!(y1 >= 1) || !(y2 > y1) || y2 > static_cast<double>(table.limit()))
        throw ConfigError("calibrate: window must lie inside the table range");
    std::vector<double> ys = sample_points(a, y1, y2, cfg.samples);
    std::vector<double> ds(ys.size());
    for (std::size_t i = 0; i < ys.size(); ++i)
        ds[i] = delta_at(table, M, ys[i]);
    return calibrate_samples(a, table, ys, ds, m_prime, cfg);
}

} // namespace divlab
