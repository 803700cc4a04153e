#include "divlab/sieve.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

namespace divlab {

static_assert(std::endian::native == std::endian::little,
              "cache format is little-endian; add byte swapping for this target");

namespace {

constexpr std::uint64_t kFnvOffset = 14695981039346656037ull;
constexpr std::uint64_t kFnvPrime = 1099511628211ull;

struct Fnv1a {
    std::uint64_t h = kFnvOffset;
    void update(const void* data, std::size_t len) {
        const auto* p = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < len; ++i) {
            h ^= p[i];
            h *= kFnvPrime;
        }
    }
    template <typename T> void update_value(const T& v) { update(&v, sizeof(T)); }
};

std::uint64_t checked_mul(std::uint64_t x, std::uint64_t y, std::uint64_t n, std::size_t j) {
    std::uint64_t r;
    if (__builtin_mul_overflow(x, y, &r)) {
        std::ostringstream os;
        os << "sieve overflow multiplying weights at n = " << n << ", pass j = " << j + 1;
        throw NumericError(os.str());
    }
    return r;
}

std::uint64_t checked_add(std::uint64_t x, std::uint64_t y, std::uint64_t n, std::size_t j) {
    std::uint64_t r;
    if (__builtin_add_overflow(x, y, &r)) {
        std::ostringstream os;
        os << "sieve overflow accumulating cell n = " << n << ", pass j = " << j + 1;
        throw NumericError(os.str());
    }
    return r;
}

// out[m * t^a] += run[m] * t^wexp for all t >= 1, m * t^a <= N.
void convolve_pass(const std::vector<std::uint64_t>& run, std::vector<std::uint64_t>& out,
                   std::uint64_t N, std::uint32_t a, std::uint32_t wexp, std::size_t j) {
    std::fill(out.begin(), out.end(), 0);
    for (std::uint64_t t = 1;; ++t) {
        // step = t^a, weight = t^wexp, both overflow-checked
        std::uint64_t step = 1;
        bool over = false;
        for (std::uint32_t i = 0; i < a; ++i)
            if (__builtin_mul_overflow(step, t, &step)) { over = true; break; }
        if (over || step > N)
            break;
        std::uint64_t w = 1;
        for (std::uint32_t i = 0; i < wexp; ++i)
            w = checked_mul(w, t, t, j);
        const std::uint64_t mmax = N / step;
        for (std::uint64_t m = 1; m <= mmax; ++m) {
            if (run[m] == 0)
                continue;
            const std::uint64_t idx = m * step;
            out[idx] = checked_add(out[idx], checked_mul(run[m], w, idx, j), idx, j);
        }
    }
}

} // namespace

DivisorTable::DivisorTable(ExponentTuple a, std::uint64_t N) : a_(std::move(a)), n_(N) {}

std::uint64_t DivisorTable::estimate_build_bytes(std::uint64_t N) {
    // three value arrays, three prefix arrays, one scratch array
    return 7 * (N + 1) * sizeof(std::uint64_t);
}

DivisorTable DivisorTable::build(const ExponentTuple& a, std::uint64_t N,
                                 std::uint64_t memory_budget_bytes) {
    if (N < 1)
        throw ConfigError("divisor table requires N >= 1");
    if (estimate_build_bytes(N) > memory_budget_bytes) {
        std::ostringstream os;
        os << "divisor table for N = " << N << " needs about " << estimate_build_bytes(N)
           << " bytes, over the budget of " << memory_budget_bytes;
        throw ConfigError(os.str());
    }

    DivisorTable t(a, N);
    t.d_.assign(N + 1, 0);
    t.dhat_.assign(N + 1, 0);
    t.c_.assign(N + 1, 0);
    t.d_[1] = t.dhat_[1] = t.c_[1] = 1;

    std::vector<std::uint64_t> scratch(N + 1);
    for (std::size_t j = 0; j < a.k(); ++j) {
        const std::uint32_t aj = a[j];
        convolve_pass(t.d_, scratch, N, aj, 0, j);
        t.d_.swap(scratch);
        convolve_pass(t.dhat_, scratch, N, aj, aj - 1, j);
        t.dhat_.swap(scratch);
        convolve_pass(t.c_, scratch, N, aj, 2 * (aj - 1), j);
        t.c_.swap(scratch);
    }

    t.build_time_ = std::chrono::duration_cast<std::chrono::seconds>(
                        std::chrono::system_clock::now().time_since_epoch())
                        .count();
    t.finalize();
    return t;
}

void DivisorTable::finalize() {
    const std::uint64_t N = n_;
    pd_.assign(N + 1, 0);
    pdhat_.assign(N + 1, 0);
    pc_.assign(N + 1, 0);
    for (std::uint64_t n = 1; n <= N; ++n) {
        pd_[n] = checked_add(pd_[n - 1], d_[n], n, 0);
        pdhat_[n] = checked_add(pdhat_[n - 1], dhat_[n], n, 0);
        pc_[n] = checked_add(pc_[n - 1], c_[n], n, 0);
    }

    Fnv1a fnv;
    fnv.update("DVLB", 4);
    fnv.update_value(kFormatVersion);
    const auto k = static_cast<std::uint32_t>(a_.k());
    fnv.update_value(k);
    for (std::size_t j = 0; j < a_.k(); ++j)
        fnv.update_value(static_cast<std::uint32_t>(a_[j]));
    fnv.update_value(N);
    fnv.update(d_.data() + 1, N * sizeof(std::uint64_t));
    fnv.update(dhat_.data() + 1, N * sizeof(std::uint64_t));
    fnv.update(c_.data() + 1, N * sizeof(std::uint64_t));
    checksum_ = fnv.h;
}

void DivisorTable::save(const std::filesystem::path& file) const {
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    if (!out)
        throw ConfigError("cannot write cache file " + file.string());
    out.write("DVLB", 4);
    auto put = [&out](const auto& v) { out.write(reinterpret_cast<const char*>(&v), sizeof(v)); };
    put(kFormatVersion);
    const auto k = static_cast<std::uint32_t>(a_.k());
    put(k);
    for (std::size_t j = 0; j < a_.k(); ++j)
        put(static_cast<std::uint32_t>(a_[j]));
    put(n_);
    out.write(reinterpret_cast<const char*>(d_.data() + 1), n_ * sizeof(std::uint64_t));
    out.write(reinterpret_cast<const char*>(dhat_.data() + 1), n_ * sizeof(std::uint64_t));
    out.write(reinterpret_cast<const char*>(c_.data() + 1), n_ * sizeof(std::uint64_t));
    put(checksum_);
    if (!out)
        throw ConfigError("short write to cache file " + file.string());
}

std::optional<DivisorTable> DivisorTable::load(const std::filesystem::path& file,
                                               const ExponentTuple& a, std::uint64_t N) {
    std::ifstream in(file, std::ios::binary);
    if (!in)
        return std::nullopt;

    char magic[4];
    if (!in.read(magic, 4) || std::memcmp(magic, "DVLB", 4) != 0)
        return std::nullopt;
    auto get = [&in](auto& v) { in.read(reinterpret_cast<char*>(&v), sizeof(v)); };
    std::uint32_t version = 0, k = 0;
    get(version);
    get(k);
    if (!in || version != kFormatVersion || k != a.k())
        return std::nullopt;
    for (std::size_t j = 0; j < a.k(); ++j) {
        std::uint32_t aj = 0;
        get(aj);
        if (!in || aj != a[j])
            return std::nullopt;
    }
    std::uint64_t n = 0;
    get(n);
    if (!in || n != N)
        return std::nullopt;

    DivisorTable t(a, N);
    t.d_.assign(N + 1, 0);
    t.dhat_.assign(N + 1, 0);
    t.c_.assign(N + 1, 0);
    in.read(reinterpret_cast<char*>(t.d_.data() + 1), N * sizeof(std::uint64_t));
    in.read(reinterpret_cast<char*>(t.dhat_.data() + 1), N * sizeof(std::uint64_t));
    in.read(reinterpret_cast<char*>(t.c_.data() + 1), N * sizeof(std::uint64_t));
    std::uint64_t stored = 0;
    get(stored);
    if (!in)
        return std::nullopt;

    t.finalize();
    if (t.checksum_ != stored)
        return std::nullopt; // corrupted; caller rebuilds
    t.from_cache_ = true;
    return t;
}

std::filesystem::path DivisorTable::cache_file_name(const ExponentTuple& a, std::uint64_t N) {
    return "dvlb-" + a.label() + "-N" + std::to_string(N) + ".bin";
}

DivisorTable DivisorTable::open_cached(const ExponentTuple& a, std::uint64_t N,
                                       const std::filesystem::path& cache_dir, bool* rebuilt,
                                       std::uint64_t memory_budget_bytes) {
    const auto file = cache_dir / cache_file_name(a, N);
    if (auto t = load(file, a, N)) {
        if (rebuilt) *rebuilt = false;
        return std::move(*t);
    }
    DivisorTable t = build(a, N, memory_budget_bytes);
    std::filesystem::create_directories(cache_dir);
    t.save(file);
    if (rebuilt) *rebuilt = true;
    return t;
}

double DivisorTable::summatory(double x, SummatoryKind kind) const {
    if (!(x >= 1) || x > static_cast<double>(n_))
        throw ConfigError("summatory: x outside [1, N]");
    const auto fl = static_cast<std::uint64_t>(std::floor(x));
    const bool integral = (static_cast<double>(fl) == x);
    const std::uint64_t below = integral ? fl - 1 : fl; // n < x

    switch (kind) {
    case SummatoryKind::D:
        return static_cast<double>(pd_[below]) +
               (integral ? 0.5 * static_cast<double>(d_[fl]) : 0.0);
    case SummatoryKind::Dhat:
        return static_cast<double>(pdhat_[below]) +
               (integral ? 0.5 * static_cast<double>(dhat_[fl]) : 0.0);
    case SummatoryKind::Dsq:
    case SummatoryKind::Dhatsq: {
        const auto& v = (kind == SummatoryKind::Dsq) ? d_ : dhat_;
        unsigned __int128 acc = 0;
        for (std::uint64_t n = 1; n <= below; ++n)
            acc += static_cast<unsigned __int128>(v[n]) * v[n];
        double r = static_cast<double>(acc);
        if (integral)
            r += 0.5 * static_cast<double>(v[fl]) * static_cast<double>(v[fl]);
        return r;
    }
    }
    throw ConfigError("summatory: bad kind");
}

SeriesConstant series_constant(const DivisorTable& table, const Rational& s) {
    const ExponentTuple& a = table.tuple();
    const Rational threshold = Rational(2) - Rational(1, a.largest());
    if (!(s > threshold)) {
        std::ostringstream os;
        os << "series diverges: need s > 2 - 1/a_k = " << threshold;
        throw NumericError(os.str());
    }

    const double sd = to_double(s);
    const std::uint64_t N = table.limit();

    // Sum ascending with compensation; also record the partial sums of
    // dhat^2 at N/2^i used for the tail constant.
    CompensatedSum sum;
    unsigned __int128 sq_prefix = 0;
    std::vector<std::uint64_t> marks;
    for (int i = 6; i >= 0; --i)
        if ((N >> i) >= 1)
            marks.push_back(N >> i);
    marks.erase(std::unique(marks.begin(), marks.end()), marks.end());
    std::size_t mark_idx = 0;
    double chat = 0.0;
    const double beta_exp = 2.0 - 1.0 / a.largest();
    for (std::uint64_t n = 1; n <= N; ++n) {
        const double dh = static_cast<double>(table.dhat(n));
        sum.add(dh * dh * std::pow(static_cast<double>(n), -sd));
        sq_prefix += static_cast<unsigned __int128>(table.dhat(n)) * table.dhat(n);
        while (mark_idx < marks.size() && n == marks[mark_idx]) {
            const double x = static_cast<double>(n);
            chat = std::max(chat, static_cast<double>(sq_prefix) / std::pow(x, beta_exp));
            ++mark_idx;
        }
    }

    // Tail by partial summation: with S(x) <= C x^beta for x >= N,
    // sum_{n>N} dhat^2 n^{-s} <= s C N^{beta-s} / (s - beta). The epsilon
    // slack in beta absorbs the log factors; C comes from the observed
    // partial-sum ratios (factor 2 headroom).
    const double gap = sd - (2.0 - 1.0 / a.largest());
    const double eps = std::min(0.1, gap / 2);
    const double beta = 2.0 - 1.0 / a.largest() + eps;
    // Anchor C so that C x^beta >= S(x) at x = N with factor-2 headroom.
    const double C = 2.0 * chat * std::pow(static_cast<double>(N), -eps);
    SeriesConstant out;
    out.value = sum.value();
    out.tail_bound = sd * C * std::pow(static_cast<double>(N), beta - sd) / (sd - beta);
    return out;
}

} // namespace divlab
