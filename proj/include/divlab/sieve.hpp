#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "divlab/exponent.hpp"

namespace divlab {

enum class SummatoryKind { D, Dhat, Dsq, Dhatsq };

/// Tables of d(a;n), dhat(a;n) and c(a;n) for n <= N, with prefix sums.
///
/// d counts ordered tuples with prod n_j^{a_j} = n; dhat weights each tuple
/// by prod n_j^{a_j - 1}; c by prod n_j^{2(a_j - 1)}. Built by one
/// convolution pass per exponent (ascending), accumulating against the
/// weighted indicator of a_j-th powers. All cells are overflow-checked.
class DivisorTable {
  public:
    static constexpr std::uint32_t kFormatVersion = 1;
    static constexpr std::uint64_t kDefaultMemoryBudget = 4ull << 30; // 4 GiB

    static DivisorTable build(const ExponentTuple& a, std::uint64_t N,
                              std::uint64_t memory_budget_bytes = kDefaultMemoryBudget);

    // Binary cache, little-endian: "DVLB", version u32, k u32, a k*u32,
    // N u64, then the d / dhat / c arrays (n = 1..N, u64 each), then a
    // 64-bit FNV-1a checksum of all preceding bytes.
    void save(const std::filesystem::path& file) const;
    static std::optional<DivisorTable> load(const std::filesystem::path& file,
                                            const ExponentTuple& a, std::uint64_t N);

    /// Load from cache_dir when a matching valid file exists, else build and
    /// save. `rebuilt` (optional) reports which happened.
    static DivisorTable open_cached(const ExponentTuple& a, std::uint64_t N,
                                    const std::filesystem::path& cache_dir,
                                    bool* rebuilt = nullptr,
                                    std::uint64_t memory_budget_bytes = kDefaultMemoryBudget);

    static std::filesystem::path cache_file_name(const ExponentTuple& a, std::uint64_t N);
    static std::uint64_t estimate_build_bytes(std::uint64_t N);

    const ExponentTuple& tuple() const { return a_; }
    std::uint64_t limit() const { return n_; }

    std::uint64_t d(std::uint64_t n) const { return d_[n]; }
    std::uint64_t dhat(std::uint64_t n) const { return dhat_[n]; }
    std::uint64_t c(std::uint64_t n) const { return c_[n]; }
    std::uint64_t prefix_d(std::uint64_t n) const { return pd_[n]; }
    std::uint64_t prefix_dhat(std::uint64_t n) const { return pdhat_[n]; }
    std::uint64_t prefix_c(std::uint64_t n) const { return pc_[n]; }

    /// Primed summatory function: full sum over n < x plus half the term at
    /// n = x when x is an integer. Squared kinds sum d^2 or dhat^2 term-wise.
    double summatory(double x, SummatoryKind kind) const;

    std::uint64_t checksum() const { return checksum_; } // FNV-1a of the cache payload
    std::int64_t build_unix_time() const { return build_time_; }
    bool loaded_from_cache() const { return from_cache_; }

  private:
    DivisorTable(ExponentTuple a, std::uint64_t N);
    void finalize(); // prefix sums + checksum

    ExponentTuple a_;
    std::uint64_t n_ = 0;
    std::vector<std::uint64_t> d_, dhat_, c_;    // 1-based, index 0 unused (= 0)
    std::vector<std::uint64_t> pd_, pdhat_, pc_; // prefix sums, same indexing
    std::uint64_t checksum_ = 0;
    std::int64_t build_time_ = 0;
    bool from_cache_ = false;
};

struct SeriesConstant {
    double value;      // sum_{n <= N} dhat(a;n)^2 / n^s
    double tail_bound; // estimated bound on the omitted tail n > N
};

/// Partial sum of the dhat^2 Dirichlet series at rational s with a tail
/// bound by partial summation against the observed growth of
/// sum_{n<=x} dhat^2. Requires s > 2 - 1/a_k.
SeriesConstant series_constant(const DivisorTable& table, const Rational& s);

} // namespace divlab
