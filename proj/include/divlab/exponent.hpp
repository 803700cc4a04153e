#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "divlab/errors.hpp"
#include "divlab/numeric.hpp"

namespace divlab {

/// Non-decreasing tuple of positive integer exponents a = (a_1, ..., a_k).
/// The constructor sorts its input, so all derived quantities are invariant
/// under reordering of the given entries.
class ExponentTuple {
  public:
    explicit ExponentTuple(std::vector<std::uint32_t> entries);
    static ExponentTuple parse(const std::string& csv);

    std::size_t k() const { return a_.size(); }
    std::uint32_t operator[](std::size_t j) const { return a_[j]; } // 0-based
    const std::vector<std::uint32_t>& values() const { return a_; }
    std::uint32_t largest() const { return a_.back(); }
    std::uint64_t sum() const;
    Rational alpha() const; // (a_1 + ... + a_k)/2
    std::string label() const; // "2-3-4", for file names
    std::string display() const; // "(2,3,4)"

    bool operator==(const ExponentTuple&) const = default;

  private:
    std::vector<std::uint32_t> a_;
};

struct DerivedConstants {
    Rational alpha;   // (a_1+...+a_k)/2
    Rational theta0;  // (k-1)/(4 alpha)
    Rational lambda0; // (k+1)/(4 alpha) - 2
    Real h;           // 2 alpha * prod a_j^{-a_j/alpha}
    Real h_error;     // absolute error bound on h
};

DerivedConstants derive_constants(const ExponentTuple& a);

/// Piecewise lower bound for the moment exponent m(sigma) on [1/2, 1),
/// stored so that 1/m(sigma) is affine on each piece.
class MomentProfile {
  public:
    struct Piece {
        Rational lo, hi; // sigma range, pieces tile [1/2, 1)
        Rational c0, c1; // 1/m(sigma) = c0 + c1*sigma on [lo, hi]
    };

    explicit MomentProfile(std::vector<Piece> pieces);

    // m >= 4/(3-4s) on [1/2,5/8], m >= 3/(1-s) on [5/8,1); continuous, value 8
    // at the knot.
    static const MomentProfile& weak_default();

    Rational inv_m(const Rational& sigma) const; // 1/m(sigma)
    const std::vector<Piece>& pieces() const { return pieces_; }

  private:
    std::vector<Piece> pieces_;
};

enum class SigmaStarMethod {
    K2Exact,
    Lemma7Case1,
    Lemma7Case2,
    Lemma7Case3or4,
    GeneralSolver,
};
const char* to_string(SigmaStarMethod m);

struct SigmaStarResult {
    Rational sigma_star;      // upper bound, exact w.r.t. the profile
    SigmaStarMethod method;
    bool floor_active;        // sigma_star == 1 - 1/(2 a_k)
    bool theorem1_applicable; // sigma_star < 1 - (k-1)/(4 alpha)
};

struct IvicResult {
    int r;      // largest r in [2,k] with (r-2) a_r <= a_1+...+a_{r-1}
    Rational g; // (r-1) / (2 (a_1+...+a_r))
};

IvicResult ivic_r_and_g(const ExponentTuple& a); // requires k >= 2

/// H(sigma) = sum_j 1/m(a_j sigma - a_j + 1), an upper bound via the
/// profile's lower bound for m. Requires every a_j sigma - a_j + 1 in
/// [1/2, 1), i.e. 1 - 1/(2 a_k) <= sigma < 1.
Rational H_sigma(const ExponentTuple& a, const Rational& sigma,
                 const MomentProfile& profile);

/// Exact upper bound for sigma*. Closed forms for k = 2 and the k = 3
/// tuples covered by the three-dimensional case analysis; otherwise solves
/// H(sigma) = 1/2 cell by cell and clamps at the floor 1 - 1/(2 a_k).
SigmaStarResult sigma_star(const ExponentTuple& a, const MomentProfile& profile);

/// The cell-walking solver alone, applicable for any k >= 2; used as a
/// cross-check against the closed forms.
SigmaStarResult sigma_star_general(const ExponentTuple& a,
                                   const MomentProfile& profile);

/// eta(a) = (2(1-s*) - (k-1)/(2a)) / (2a(3 - 2s* - 1/a_k) - 1).
/// Throws InapplicabilityError unless s* < 1 - (k-1)/(4 alpha).
Rational eta(const ExponentTuple& a, const Rational& sigma_star_value);

enum class Eta3Case { Case1, Case2, Case3Otherwise };
const char* to_string(Eta3Case c);

struct Eta3Result {
    Rational value;
    Eta3Case branch;
};

/// Three-branch closed form for k = 3; requires a_3 < a_1 + a_2.
Eta3Result eta3(const ExponentTuple& a);

struct ApplicabilityReport {
    bool necessary_condition; // (k-2) a_k < a_1 + ... + a_{k-1}
    bool sigma_condition;     // sigma* < 1 - (k-1)/(4 alpha)
    Rational mean_square_exponent;          // 1 + (k-1)/(2 alpha)
    std::optional<IvicResult> ivic;         // absent when k = 1
    std::optional<Rational> ivic_exponent;  // 1 + 2 g_k
    bool exponents_coincide;                // holds whenever r = k
    std::optional<SigmaStarResult> sigma;   // absent when k = 1
    std::optional<Rational> eta_value;      // present when sigma_condition
};

ApplicabilityReport check_applicability(const ExponentTuple& a,
                                        const MomentProfile& profile);

} // namespace divlab
