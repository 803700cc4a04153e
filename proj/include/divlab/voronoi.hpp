#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "divlab/error_analysis.hpp"

namespace divlab {

/// Parameters of the truncated oscillating sum
///   R1(y) = kappa * y^theta0 * sum_{n<=M'} dhat(a;n)/n^{1-theta0}
///           * cos(omega * (y n)^{1/(2 alpha)} + phase * pi).
struct TruncatedSeriesParams {
    explicit TruncatedSeriesParams(ExponentTuple tuple) : a(std::move(tuple)) {}

    ExponentTuple a;
    std::uint64_t m_prime = 1;
    double kappa = 0.0;
    double phase = 0.0; // in units of pi
    double omega = 0.0; // frequency against u = y^{1/(2 alpha)} at n = 1
};

double eval_truncated(const TruncatedSeriesParams& p, const DivisorTable& table, double y);

struct CalibrationConfig {
    std::size_t samples = 4096;
    double oversample = 8.0;       // periodogram resolution refinement
    double band_lo = 0.25;         // search band, multiples of nominal h*pi
    double band_hi = 5.0;
    double peak_floor = 3.0;       // significance: peak > floor * median
    double first_peak_fraction = 0.15; // fundamental vs global max
    std::uint64_t refine_terms = 64;   // truncated model for the frequency scan
};

struct CalibrationResult {
    explicit CalibrationResult(ExponentTuple tuple) : params(std::move(tuple)) {}

    TruncatedSeriesParams params;
    double residual_ratio = 0;    // MS(delta - R1) / MS(delta) over the window
    double nominal_omega = 0;     // h * pi
    double omega_ratio = 0;       // fitted / nominal
    double periodogram_peak = 0;
    double periodogram_median = 0;
};

/// Identify the fundamental frequency of measured Delta on [y1, y2] by a
/// periodogram in u = y^{1/(2 alpha)}, then fit amplitude and phase of the
/// M'-term model by linear least squares (with a local frequency polish).
CalibrationResult calibrate(const ExponentTuple& a, const DivisorTable& table,
                            const MainTerm& M, double y1, double y2,
                            std::uint64_t m_prime, const CalibrationConfig& cfg = {});

/// Same, over caller-provided (y, delta) samples; the table only supplies
/// dhat up to m_prime. Used for synthetic round trips.
CalibrationResult calibrate_samples(const ExponentTuple& a, const DivisorTable& table,
                                    std::span<const double> y,
                                    std::span<const double> delta,
                                    std::uint64_t m_prime,
                                    const CalibrationConfig& cfg = {});

/// u-equispaced half-integer sample abscissas inside [y1, y2].
std::vector<double> sample_points(const ExponentTuple& a, double y1, double y2,
                                  std::size_t samples);

} // namespace divlab
