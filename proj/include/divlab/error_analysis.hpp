#pragma once

#include <optional>
#include <vector>

#include "divlab/main_term.hpp"
#include "divlab/sieve.hpp"

namespace divlab {

/// Delta(a;x) = primed summatory of d(a;n) minus the main term.
double delta_at(const DivisorTable& table, const MainTerm& M, double x);

struct MeanSquareCheckpoint {
    double T;
    double V;     // integral of Delta^2 over [1, T]
    double ratio; // V / T^{predicted exponent}
};

struct MeanSquareProfile {
    explicit MeanSquareProfile(ExponentTuple tuple) : a(std::move(tuple)) {}

    ExponentTuple a;
    double T = 0;
    int quad_order = 0;
    std::vector<MeanSquareCheckpoint> checkpoints; // ascending, last at T
    Rational predicted_exponent_exact;             // 1 + (k-1)/(2 alpha)
    double predicted_exponent = 0;
    std::optional<double> predicted_constant; // closed form, when one is known
    double quad_error_estimate = 0;           // summed embedded-rule differences
    bool quad_warning = false;
};

struct MeanSquareConfig {
    int quad_order = 8;       // Gauss-Legendre nodes per interval, in [4, 16]
    unsigned threads = 1;     // worker cap; results identical for any value
    double quad_tol_rel = 1e-6;
};

/// V(T) = int_1^T Delta^2 dx by per-interval Gauss-Legendre quadrature of
/// (counting sum - H(x))^2; the counting sum is constant between integers.
/// Checkpoints at T/2^i, i = 0..floor(log2 T)-4.
MeanSquareProfile mean_square(const DivisorTable& table, const MainTerm& M, double T,
                              const MeanSquareConfig& cfg = {});

struct PowerLawFit {
    double slope;
    double constant; // exp(intercept)
    double slope_stderr;
    double intercept_stderr;
    std::vector<MeanSquareCheckpoint> used; // after transient discard
    std::vector<double> ratios;             // V_i / T_i^{predicted}, all checkpoints
    double ratio_at_T;                      // empirical constant at the largest T
};

/// Log-log least squares over the checkpoints, discarding the four smallest
/// (transient octaves). Requires >= 5 checkpoints and positive V throughout.
PowerLawFit fit_power_law(const MeanSquareProfile& profile);

} // namespace divlab
