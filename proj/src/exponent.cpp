#include "divlab/exponent.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace divlab {

ExponentTuple::ExponentTuple(std::vector<std::uint32_t> entries) : a_(std::move(entries)) {
    if (a_.empty())
        throw ConfigError("exponent tuple must have at least one entry");
    for (auto v : a_)
        if (v == 0)
            throw ConfigError("exponent tuple entries must be positive integers");
    std::sort(a_.begin(), a_.end());
}

ExponentTuple ExponentTuple::parse(const std::string& csv) {
    std::vector<std::uint32_t> vals;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        // trim spaces
        auto b = item.find_first_not_of(" \t");
        auto e = item.find_last_not_of(" \t");
        if (b == std::string::npos)
            throw ConfigError("empty entry in exponent tuple '" + csv + "'");
        item = item.substr(b, e - b + 1);
        try {
            std::size_t pos = 0;
            long long v = std::stoll(item, &pos);
            if (pos != item.size() || v <= 0 || v > 0xffffffffLL)
                throw std::invalid_argument(item);
            vals.push_back(static_cast<std::uint32_t>(v));
        } catch (const std::exception&) {
            throw ConfigError("bad exponent tuple entry '" + item + "' in '" + csv + "'");
        }
    }
    if (vals.empty())
        throw ConfigError("empty exponent tuple '" + csv + "'");
    return ExponentTuple(std::move(vals));
}

std::uint64_t ExponentTuple::sum() const {
    return std::accumulate(a_.begin(), a_.end(), std::uint64_t{0});
}

Rational ExponentTuple::alpha() const { return Rational(sum(), 2); }

std::string ExponentTuple::label() const {
    std::string s;
    for (std::size_t j = 0; j < a_.size(); ++j) {
        if (j) s += '-';
        s += std::to_string(a_[j]);
    }
    return s;
}

std::string ExponentTuple::display() const {
    std::string s = "(";
    for (std::size_t j = 0; j < a_.size(); ++j) {
        if (j) s += ',';
        s += std::to_string(a_[j]);
    }
    return s + ")";
}

DerivedConstants derive_constants(const ExponentTuple& a) {
    DerivedConstants out;
    const auto k = static_cast<long long>(a.k());
    out.alpha = a.alpha();
    out.theta0 = Rational(k - 1) / (4 * out.alpha);
    out.lambda0 = Rational(k + 1) / (4 * out.alpha) - 2;

    // h = 2 alpha * exp(-sum_j (a_j/alpha) log a_j)
    const Real alpha_r = to_real(out.alpha);
    Real expo = 0;
    for (std::size_t j = 0; j < a.k(); ++j)
        expo -= Real(a[j]) * log(Real(a[j]));
    out.h = 2 * alpha_r * exp(expo / alpha_r);
    // exp/log at working precision are accurate to a few ulps; claim ten
    // digits less than the working type carries.
    out.h_error = out.h * pow(Real(10), -90);
    return out;
}

MomentProfile::MomentProfile(std::vector<Piece> pieces) : pieces_(std::move(pieces)) {
    if (pieces_.empty())
        throw ConfigError("moment profile needs at least one piece");
    if (pieces_.front().lo != Rational(1, 2) || pieces_.back().hi != Rational(1))
        throw ConfigError("moment profile must cover [1/2, 1)");
    for (std::size_t i = 0; i < pieces_.size(); ++i) {
        const auto& p = pieces_[i];
        if (!(p.lo < p.hi))
            throw ConfigError("moment profile piece has empty range");
        if (p.c1 > 0)
            throw ConfigError("moment profile must be non-decreasing in m");
        Rational at_lo = p.c0 + p.c1 * p.lo;
        Rational at_hi = p.c0 + p.c1 * p.hi;
        if (at_lo > Rational(1, 4) || at_hi > Rational(1, 4))
            throw ConfigError("moment profile violates m(sigma) >= 4");
        if (!(at_lo > 0) || at_hi < 0)
            throw ConfigError("moment profile gives non-positive 1/m");
        if (i + 1 < pieces_.size()) {
            const auto& q = pieces_[i + 1];
            if (p.hi != q.lo)
                throw ConfigError("moment profile pieces must tile [1/2, 1)");
            if (at_hi != q.c0 + q.c1 * q.lo)
                throw ConfigError("moment profile must be continuous");
        }
    }
}

const MomentProfile& MomentProfile::weak_default() {
    static const MomentProfile profile({
        // 1/m = (3 - 4 sigma)/4 on [1/2, 5/8]
        {Rational(1, 2), Rational(5, 8), Rational(3, 4), Rational(-1)},
        // 1/m = (1 - sigma)/3 on [5/8, 1)
        {Rational(5, 8), Rational(1), Rational(1, 3), Rational(-1, 3)},
    });
    return profile;
}

Rational MomentProfile::inv_m(const Rational& sigma) const {
    if (sigma < Rational(1, 2) || sigma >= 1)
        throw ConfigError("moment profile queried outside [1/2, 1)");
    for (const auto& p : pieces_)
        if (sigma >= p.lo && sigma <= p.hi)
            return p.c0 + p.c1 * sigma;
    throw ConfigError("moment profile has a gap"); // unreachable after validation
}

const char* to_string(SigmaStarMethod m) {
    switch (m) {
    case SigmaStarMethod::K2Exact: return "k2-exact";
    case SigmaStarMethod::Lemma7Case1: return "lemma7-case1";
    case SigmaStarMethod::Lemma7Case2: return "lemma7-case2";
    case SigmaStarMethod::Lemma7Case3or4: return "lemma7-case3or4";
    case SigmaStarMethod::GeneralSolver: return "general-solver";
    }
    return "?";
}

const char* to_string(Eta3Case c) {
    switch (c) {
    case Eta3Case::Case1: return "case1";
    case Eta3Case::Case2: return "case2";
    case Eta3Case::Case3Otherwise: return "case3-otherwise";
    }
    return "?";
}

IvicResult ivic_r_and_g(const ExponentTuple& a) {
    const std::size_t k = a.k();
    if (k < 2)
        throw ConfigError("g_k requires k >= 2");
    // largest r in [2,k] with (r-2) a_r <= a_1 + ... + a_{r-1}
    std::vector<std::uint64_t> pre(k + 1, 0);
    for (std::size_t j = 0; j < k; ++j)
        pre[j + 1] = pre[j] + a[j];
    int r = 2;
    for (std::size_t cand = k; cand >= 2; --cand) {
        std::uint64_t lhs = static_cast<std::uint64_t>(cand - 2) * a[cand - 1];
        if (lhs <= pre[cand - 1]) {
            r = static_cast<int>(cand);
            break;
        }
    }
    IvicResult out;
    out.r = r;
    out.g = Rational(r - 1) / Rational(2 * pre[r]);
    return out;
}

namespace {

Rational sigma_floor(const ExponentTuple& a) {
    return Rational(1) - Rational(1, 2 * static_cast<std::uint64_t>(a.largest()));
}

Rational theorem1_threshold(const ExponentTuple& a) {
    return Rational(1) - Rational(static_cast<long long>(a.k()) - 1) / (4 * a.alpha());
}

} // namespace

Rational H_sigma(const ExponentTuple& a, const Rational& sigma,
                 const MomentProfile& profile) {
    Rational H = 0;
    for (std::size_t j = 0; j < a.k(); ++j) {
        Rational sj = Rational(a[j]) * sigma - Rational(a[j]) + 1;
        if (sj < Rational(1, 2) || sj >= 1) {
            std::ostringstream os;
            os << "H(sigma): sigma_j = " << sj << " for a_" << (j + 1) << " = " << a[j]
               << " falls outside [1/2, 1); need 1 - 1/(2 a_k) <= sigma < 1";
            throw ConfigError(os.str());
        }
        H += profile.inv_m(sj);
    }
    return H;
}

SigmaStarResult sigma_star_general(const ExponentTuple& a,
                                   const MomentProfile& profile) {
    if (a.k() < 2)
        throw ConfigError("sigma* solver requires k >= 2");
    const Rational lo = sigma_floor(a);

    // Cell boundaries: profile knots pulled back through sigma_j = a_j s - a_j + 1.
    std::vector<Rational> cuts{lo};
    for (const auto& piece : profile.pieces()) {
        for (const Rational& knot : {piece.lo, piece.hi}) {
            if (knot >= 1) continue;
            for (std::size_t j = 0; j < a.k(); ++j) {
                Rational s = (Rational(a[j]) - 1 + knot) / Rational(a[j]);
                if (s > lo && s < 1)
                    cuts.push_back(s);
            }
        }
    }
    cuts.push_back(1);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    SigmaStarResult out;
    out.method = SigmaStarMethod::GeneralSolver;

    const Rational half(1, 2);
    if (H_sigma(a, lo, profile) <= half) {
        out.sigma_star = lo; // the trivial floor binds
        out.floor_active = true;
        out.theorem1_applicable = out.sigma_star < theorem1_threshold(a);
        return out;
    }

    // H is strictly decreasing and piecewise affine; walk the cells.
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const Rational &cl = cuts[i], &cr = cuts[i + 1];
        Rational mid = (cl + cr) / 2;
        // affine coefficients on this cell: H(s) = A + B s
        Rational A = 0, B = 0;
        for (std::size_t j = 0; j < a.k(); ++j) {
            Rational sj_mid = Rational(a[j]) * mid - Rational(a[j]) + 1;
            for (const auto& p : profile.pieces()) {
                if (sj_mid >= p.lo && sj_mid <= p.hi) {
                    A += p.c0 + p.c1 * (Rational(1) - Rational(a[j]));
                    B += p.c1 * Rational(a[j]);
                    break;
                }
            }
        }
        if (B == 0)
            continue; // flat piece cannot cross 1/2 (H already > 1/2 at cl)
        Rational root = (half - A) / B;
        if (root >= cl && root < cr) {
            out.sigma_star = root;
            out.floor_active = (root == lo);
            out.theorem1_applicable = out.sigma_star < theorem1_threshold(a);
            return out;
        }
    }
    throw NumericError("sigma* solver found no crossing; profile invalid?");
}

SigmaStarResult sigma_star(const ExponentTuple& a, const MomentProfile& profile) {
    if (a.k() < 2)
        throw ConfigError("sigma* requires k >= 2");

    SigmaStarResult out;
    if (a.k() == 2) {
        out.sigma_star = sigma_floor(a);
        out.method = SigmaStarMethod::K2Exact;
        out.floor_active = true;
        out.theorem1_applicable = out.sigma_star < theorem1_threshold(a);
        return out;
    }
    if (a.k() == 3 &&
        static_cast<std::uint64_t>(a[2]) < std::uint64_t{a[0]} + a[1]) {
        const std::int64_t a1 = a[0], a2 = a[1], a3 = a[2];
        const std::int64_t S = a1 + a2 + a3;
        if (3 * (a2 + a3) <= 7 * a1) {
            out.sigma_star = Rational(1) - Rational(5, 4 * S);
            out.method = SigmaStarMethod::Lemma7Case1;
        } else if (3 * a3 + a1 <= 5 * a2 && 3 * a3 < a1 + 3 * a2) {
            out.sigma_star = Rational(1) - Rational(3, a1 + 3 * a2 + 3 * a3);
            out.method = SigmaStarMethod::Lemma7Case2;
        } else {
            out.sigma_star = sigma_floor(a);
            out.method = SigmaStarMethod::Lemma7Case3or4;
        }
        out.floor_active = (out.sigma_star == sigma_floor(a));
        out.theorem1_applicable = out.sigma_star < theorem1_threshold(a);
        return out;
    }
    return sigma_star_general(a, profile);
}

Rational eta(const ExponentTuple& a, const Rational& sigma_star_value) {
    const Rational alpha = a.alpha();
    const auto k = static_cast<long long>(a.k());
    if (!(sigma_star_value < theorem1_threshold(a))) {
        std::ostringstream os;
        os << "eta: sigma* = " << sigma_star_value << " does not satisfy sigma* < 1 - (k-1)/(4 alpha) = "
           << theorem1_threshold(a) << " for a = " << a.display();
        throw InapplicabilityError(os.str());
    }
    Rational num = 2 * (Rational(1) - sigma_star_value) - Rational(k - 1) / (2 * alpha);
    Rational den =
        2 * alpha * (Rational(3) - 2 * sigma_star_value - Rational(1, a.largest())) - 1;
    Rational result = num / den;
    if (!(result > 0))
        throw NumericError("eta came out non-positive; hypothesis check is broken");
    return result;
}

Eta3Result eta3(const ExponentTuple& a) {
    if (a.k() != 3)
        throw ConfigError("eta3 requires k = 3");
    const std::int64_t a1 = a[0], a2 = a[1], a3 = a[2];
    if (!(a3 < a1 + a2)) {
        std::ostringstream os;
        os << "eta3: hypothesis a_3 < a_1 + a_2 fails for a = " << a.display();
        throw InapplicabilityError(os.str());
    }
    const std::int64_t S = a1 + a2 + a3;
    Eta3Result out;
    if (3 * (a2 + a3) <= 7 * a1) {
        out.branch = Eta3Case::Case1;
        out.value = Rational(1) / (Rational(S) * (3 + 2 * Rational(S) * (Rational(1) - Rational(1, a3))));
    } else if (3 * a3 + a1 <= 5 * a2 && 3 * a3 < a1 + 3 * a2) {
        out.branch = Eta3Case::Case2;
        Rational den = Rational(S) * (Rational(S) * (a1 + 3 * a2 + 3 * a3) * (a3 - 1) +
                                      Rational(a3) * (5 * a1 + 3 * a2 + 3 * a3));
        out.value = Rational(4 * a1 * a3) / den;
    } else {
        out.branch = Eta3Case::Case3Otherwise;
        out.value = Rational(a1 + a2 - a3) / (Rational(a3) * S * (S - 1));
    }
    return out;
}

ApplicabilityReport check_applicability(const ExponentTuple& a,
                                        const MomentProfile& profile) {
    ApplicabilityReport rep;
    const std::size_t k = a.k();
    const Rational alpha = a.alpha();

    std::uint64_t head = 0;
    for (std::size_t j = 0; j + 1 < k; ++j)
        head += a[j];
    if (k == 1) // (k-2) a_k < 0 <= empty sum
        rep.necessary_condition = true;
    else
        rep.necessary_condition = static_cast<std::uint64_t>(k - 2) * a.largest() < head;

    rep.mean_square_exponent =
        Rational(1) + Rational(static_cast<long long>(k) - 1) / (2 * alpha);

    if (k >= 2) {
        rep.ivic = ivic_r_and_g(a);
        rep.ivic_exponent = Rational(1) + 2 * rep.ivic->g;
        rep.sigma = sigma_star(a, profile);
        rep.sigma_condition = rep.sigma->theorem1_applicable;
        if (rep.sigma_condition)
            rep.eta_value = eta(a, rep.sigma->sigma_star);
        rep.exponents_coincide = (*rep.ivic_exponent == rep.mean_square_exponent);
    } else {
        rep.sigma_condition = true; // (k-1)/(4 alpha) = 0, the condition is sigma* < 1
        rep.exponents_coincide = true;
    }
    return rep;
}

} // namespace divlab
