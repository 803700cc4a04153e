#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <functional>

#include "divlab/sieve.hpp"
#include "oracles.hpp"

using namespace divlab;
using divlab::testing::borwein_zeta;
using divlab::testing::brute_tables;

namespace {

ExponentTuple tup(std::initializer_list<std::uint32_t> v) {
    return ExponentTuple(std::vector<std::uint32_t>(v));
}

void for_each_tuple(std::size_t k, std::uint32_t max_entry,
                    const std::function<void(const ExponentTuple&)>& fn) {
    std::vector<std::uint32_t> cur(k, 1);
    while (true) {
        fn(ExponentTuple(cur));
        std::size_t j = k;
        while (j-- > 0) {
            if (cur[j] < max_entry) {
                ++cur[j];
                for (std::size_t i = j + 1; i < k; ++i)
                    cur[i] = cur[j];
                break;
            }
            if (j == 0)
                return;
        }
    }
}

} // namespace

TEST_CASE("frozen small tables") {
    auto t11 = DivisorTable::build(tup({1, 1}), 6);
    CHECK(t11.d(6) == 4);
    CHECK(t11.dhat(6) == 4); // all weights 1 when every a_j = 1

    auto t23 = DivisorTable::build(tup({2, 3}), 64);
    CHECK(t23.d(64) == 2); // (8,1) and (1,4)
    CHECK(t23.dhat(64) == 8 + 16);

    auto t12 = DivisorTable::build(tup({1, 2}), 4);
    CHECK(t12.d(4) == 2); // (4,1) and (1,2)
    CHECK(t12.dhat(4) == 1 + 2);
    CHECK(t12.c(4) == 1 + 4);
}

TEST_CASE("oracle equivalence and invariants") {
    for (std::size_t k = 1; k <= 3; ++k) {
        for_each_tuple(k, 4, [&](const ExponentTuple& a) {
            const std::uint64_t N = 2000;
            auto t = DivisorTable::build(a, N);
            auto brute = brute_tables(a, N);
            std::uint64_t sd = 0, sdh = 0, sc = 0;
            for (std::uint64_t n = 1; n <= N; ++n) {
                REQUIRE(t.d(n) == brute.d[n]);
                REQUIRE(t.dhat(n) == brute.dhat[n]);
                REQUIRE(t.c(n) == brute.c[n]);
                // Cauchy-Schwarz direction
                REQUIRE(t.dhat(n) * t.dhat(n) >= t.c(n));
                if (a[0] == 1)
                    REQUIRE(t.d(n) >= 1);
                sd += t.d(n);
                sdh += t.dhat(n);
                sc += t.c(n);
                REQUIRE(t.prefix_d(n) == sd);
                REQUIRE(t.prefix_dhat(n) == sdh);
                REQUIRE(t.prefix_c(n) == sc);
            }
            CHECK(t.d(1) == 1);
            CHECK(t.dhat(1) == 1);
            CHECK(t.c(1) == 1);
            bool all_ones = a.largest() == 1;
            if (all_ones)
                for (std::uint64_t n = 1; n <= N; ++n)
                    REQUIRE(t.dhat(n) == t.d(n));
        });
    }
}

TEST_CASE("input order does not matter") {
    auto t1 = DivisorTable::build(tup({3, 1, 2}), 500);
    auto t2 = DivisorTable::build(tup({1, 2, 3}), 500);
    for (std::uint64_t n = 1; n <= 500; ++n) {
        REQUIRE(t1.d(n) == t2.d(n));
        REQUIRE(t1.dhat(n) == t2.dhat(n));
        REQUIRE(t1.c(n) == t2.c(n));
    }
    CHECK(t1.checksum() == t2.checksum());
}

TEST_CASE("primed summatory") {
    auto t = DivisorTable::build(tup({1, 1}), 10);
    CHECK(t.summatory(4.0, SummatoryKind::D) == doctest::Approx(6.5)); // 1+2+2+3/2
    CHECK(t.summatory(4.5, SummatoryKind::D) == doctest::Approx(8.0));
    CHECK(t.summatory(1.0, SummatoryKind::D) == doctest::Approx(0.5));
    CHECK(t.summatory(4.0, SummatoryKind::Dsq) == doctest::Approx(1 + 4 + 4 + 4.5));
    CHECK_THROWS_AS(t.summatory(11.0, SummatoryKind::D), ConfigError);
    CHECK_THROWS_AS(t.summatory(0.5, SummatoryKind::D), ConfigError);
}

TEST_CASE("memory budget enforced before allocation") {
    CHECK_THROWS_AS(DivisorTable::build(tup({1, 1}), 1'000'000, /*budget=*/1 << 20),
                    ConfigError);
}

TEST_CASE("series constant") {
    SUBCASE("divergence threshold") {
        auto t = DivisorTable::build(tup({1, 2}), 100);
        CHECK_THROWS_AS(series_constant(t, Rational(3, 2)), NumericError); // = 2 - 1/2
        CHECK_NOTHROW(series_constant(t, Rational(8, 5)));
    }

    SUBCASE("large s leaves only n = 1") {
        auto t = DivisorTable::build(tup({2, 3}), 1000);
        auto sc = series_constant(t, Rational(40));
        CHECK(sc.value == doctest::Approx(1.0).epsilon(1e-9));
    }

    SUBCASE("hand-enumerated leading terms at s = 10") {
        auto t = DivisorTable::build(tup({1, 1}), 50000);
        auto sc = series_constant(t, Rational(10));
        double expected = 0;
        for (std::uint64_t n = 1; n <= 50; ++n) {
            double d = 0;
            for (std::uint64_t a = 1; a <= n; ++a)
                if (n % a == 0)
                    d += 1;
            expected += d * d * std::pow(static_cast<double>(n), -10.0);
        }
        CHECK(sc.value == doctest::Approx(expected).epsilon(1e-9));
    }

    SUBCASE("bracket against the zeta^4/zeta(2s) identity at s = 3/2") {
        auto t = DivisorTable::build(tup({1, 1}), 100000);
        auto sc = series_constant(t, Rational(3, 2));
        const double identity =
            to_double(pow(borwein_zeta(Real(1.5)), 4) / borwein_zeta(Real(3)));
        CHECK(sc.value < identity);                   // positive terms only
        CHECK(identity - sc.value < sc.tail_bound);   // tail bound is honest
        CHECK(sc.tail_bound < 0.35 * identity);       // and not vacuous
    }
}

TEST_CASE("dirichlet series cross-check at sigma = 3") {
    // partial sums of d(a;n) n^{-3} approach prod_j zeta(3 a_j)
    for (auto init : {std::vector<std::uint32_t>{1, 1}, {1, 2}, {2, 3}}) {
        ExponentTuple a(init);
        CAPTURE(a.display());
        const std::uint64_t N = 20000;
        auto t = DivisorTable::build(a, N);
        CompensatedSum partial;
        for (std::uint64_t n = 1; n <= N; ++n)
            if (t.d(n))
                partial.add(static_cast<double>(t.d(n)) * std::pow(static_cast<double>(n), -3.0));
        Real prod = 1;
        for (std::size_t j = 0; j < a.k(); ++j)
            prod *= borwein_zeta(Real(3 * a[j]));
        // analytic tail: sum_{n>N} d(a;n)/n^3 <= zeta-type tail ~ log^k N / N^2
        const double tail = 50.0 * std::pow(std::log(static_cast<double>(N)),
                                            static_cast<double>(a.k())) /
                            (static_cast<double>(N) * static_cast<double>(N));
        CHECK(std::abs(partial.value() - to_double(prod)) < tail);
    }
}

TEST_CASE("lemma-5 style sandwich at unit scale") {
    auto t = DivisorTable::build(tup({1, 2}), 100000);
    const double expo = 2.0 - 1.0 / 2.0;
    double prev = 0;
    for (int i = 6; i >= 0; --i) {
        const double x = 100000.0 / (1 << i);
        const double ratio = t.summatory(x, SummatoryKind::Dhatsq) / std::pow(x, expo);
        if (prev > 0) {
            CHECK(ratio / prev < std::pow(x, 0.1));
            CHECK(prev / ratio < std::pow(x, 0.1));
        }
        prev = ratio;
    }
}

TEST_CASE("cache round trip") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "divlab-test-cache";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const fs::path file = dir / "t.bin";

    ExponentTuple a = tup({1, 2});
    auto t = DivisorTable::build(a, 5000);
    t.save(file);

    auto loaded = DivisorTable::load(file, a, 5000);
    REQUIRE(loaded.has_value());
    CHECK(loaded->loaded_from_cache());
    CHECK(loaded->checksum() == t.checksum());
    for (std::uint64_t n = 1; n <= 5000; ++n) {
        REQUIRE(loaded->d(n) == t.d(n));
        REQUIRE(loaded->dhat(n) == t.dhat(n));
        REQUIRE(loaded->c(n) == t.c(n));
    }

    SUBCASE("mismatched parameters refuse to load") {
        CHECK_FALSE(DivisorTable::load(file, a, 4999).has_value());
        CHECK_FALSE(DivisorTable::load(file, tup({1, 3}), 5000).has_value());
    }

    SUBCASE("corruption is detected") {
        std::fstream f(file, std::ios::in | std::ios::out | std::ios::binary);
        f.seekp(200);
        const char junk = 0x5a;
        f.write(&junk, 1);
        f.close();
        CHECK_FALSE(DivisorTable::load(file, a, 5000).has_value());
    }

    SUBCASE("open_cached builds once then reuses") {
        bool rebuilt = false;
        auto t1 = DivisorTable::open_cached(a, 3000, dir, &rebuilt);
        CHECK(rebuilt);
        auto t2 = DivisorTable::open_cached(a, 3000, dir, &rebuilt);
        CHECK_FALSE(rebuilt);
        CHECK(t1.checksum() == t2.checksum());
    }

    fs::remove_all(dir);
}
