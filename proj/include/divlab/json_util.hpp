#pragma once

#include <json.hpp>

#include "divlab/error_analysis.hpp"
#include "divlab/voronoi.hpp"

namespace divlab {

inline nlohmann::json rational_json(const Rational& q) {
    const BigInt num = boost::multiprecision::numerator(q);
    const BigInt den = boost::multiprecision::denominator(q);
    nlohmann::json j;
    static const BigInt lo = std::numeric_limits<std::int64_t>::min();
    static const BigInt hi = std::numeric_limits<std::int64_t>::max();
    if (num >= lo && num <= hi && den <= hi) {
        j["num"] = num.convert_to<std::int64_t>();
        j["den"] = den.convert_to<std::int64_t>();
    } else {
        j["num"] = num.str();
        j["den"] = den.str();
    }
    return j;
}

inline std::string real_string(const Real& x, int digits) {
    return x.str(digits, std::ios_base::scientific);
}

inline nlohmann::json to_json(const DerivedConstants& dc, int digits = 60) {
    return {
        {"alpha", rational_json(dc.alpha)},
        {"theta0", rational_json(dc.theta0)},
        {"lambda0", rational_json(dc.lambda0)},
        {"h", real_string(dc.h, digits)},
        {"h_error_bound", real_string(dc.h_error, 3)},
    };
}

inline nlohmann::json to_json(const SigmaStarResult& s) {
    return {
        {"value", rational_json(s.sigma_star)},
        {"value_approx", to_double(s.sigma_star)},
        {"method", to_string(s.method)},
        {"floor_active", s.floor_active},
        {"theorem1_applicable", s.theorem1_applicable},
    };
}

inline nlohmann::json to_json(const ApplicabilityReport& rep) {
    nlohmann::json j{
        {"necessary_condition", rep.necessary_condition},
        {"sigma_condition", rep.sigma_condition},
        {"applicable", rep.necessary_condition && rep.sigma_condition},
        {"mean_square_exponent", rational_json(rep.mean_square_exponent)},
        {"exponents_coincide", rep.exponents_coincide},
    };
    if (!rep.necessary_condition)
        j["reason"] = "(k-2)*a_k >= a_1+...+a_{k-1}";
    else if (!rep.sigma_condition)
        j["reason"] = "sigma* >= 1 - (k-1)/(4 alpha)";
    if (rep.ivic) {
        j["ivic"] = {{"r", rep.ivic->r},
                     {"g", rational_json(rep.ivic->g)},
                     {"exponent", rational_json(*rep.ivic_exponent)}};
    }
    if (rep.sigma)
        j["sigma_star"] = to_json(*rep.sigma);
    if (rep.eta_value)
        j["eta"] = rational_json(*rep.eta_value);
    return j;
}

inline nlohmann::json to_json(const MainTerm& M) {
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& p : M.pieces()) {
        nlohmann::json logpoly = nlohmann::json::array();
        for (const auto& v : p.logpoly)
            logpoly.push_back(real_string(v, M.precision_digits()));
        terms.push_back({{"exponent", rational_json(p.exponent)}, {"logpoly", logpoly}});
    }
    return {
        {"tuple", M.tuple().values()},
        {"terms", terms},
        {"excluded_constant_at_zero", to_double(M.excluded_constant())},
        {"precision_digits", M.precision_digits()},
    };
}

inline nlohmann::json to_json(const MeanSquareProfile& p) {
    nlohmann::json cps = nlohmann::json::array();
    for (const auto& cp : p.checkpoints)
        cps.push_back({{"T", cp.T}, {"V", cp.V}, {"ratio", cp.ratio}});
    nlohmann::json j{
        {"tuple", p.a.values()},
        {"T", p.T},
        {"quad_order", p.quad_order},
        {"predicted_exponent", rational_json(p.predicted_exponent_exact)},
        {"checkpoints", cps},
        {"quad_error_estimate", p.quad_error_estimate},
        {"quad_warning", p.quad_warning},
    };
    if (p.predicted_constant)
        j["predicted_constant"] = *p.predicted_constant;
    return j;
}

inline nlohmann::json to_json(const PowerLawFit& f) {
    return {
        {"slope", f.slope},
        {"constant", f.constant},
        {"slope_stderr", f.slope_stderr},
        {"intercept_stderr", f.intercept_stderr},
        {"ratio_at_T", f.ratio_at_T},
        {"ratios", f.ratios},
        {"points_used", f.used.size()},
    };
}

inline nlohmann::json to_json(const CalibrationResult& c) {
    return {
        {"tuple", c.params.a.values()},
        {"m_prime", c.params.m_prime},
        {"kappa", c.params.kappa},
        {"phase", c.params.phase},
        {"omega", c.params.omega},
        {"nominal_omega", c.nominal_omega},
        {"omega_ratio", c.omega_ratio},
        {"residual_ratio", c.residual_ratio},
        {"periodogram_peak", c.periodogram_peak},
        {"periodogram_median", c.periodogram_median},
    };
}

} // namespace divlab
