#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "polylab/count.hpp"
#include "polylab/environment.hpp"
#include "polylab/transfer.hpp"
#include "support/enumeration.hpp"

using namespace polylab;
using testing::ManualEnvironment;

TEST_CASE("all-zero environment reduces to walk counts") {
    ManualEnvironment env(1, 6);
    auto table = count_table(env, 6);
    REQUIRE(table.exact);
    CHECK(table.h_min == 0);
    CHECK(table.h_max == 0);
    // C_6(x, 0) are the binomial path counts; total is 2^6.
    auto endpoints = table.endpoint_counts();
    u128 total = 0;
    for (auto c : endpoints) total += c;
    CHECK(total == table.total_paths());
    Site origin{0};
    CHECK(table.count(table.box.index_of(origin), 0) == 20);  // C(6,3)
    auto measure = empirical_measure(table);
    REQUIRE(measure.atoms.size() == 1);
    CHECK(measure.atoms[0].h == 0);
    CHECK(measure.masses_sum_to_one(table));
}

TEST_CASE("one-step fixture") {
    ManualEnvironment env(1, 1);
    env.set(1, Site{1}, 1.0);
    env.set(1, Site{-1}, 0.0);
    auto table = count_table(env, 1);
    Site up{1}, down{-1};
    CHECK(table.count(table.box.index_of(up), 1) == 1);
    CHECK(table.count(table.box.index_of(up), 0) == 0);
    CHECK(table.count(table.box.index_of(down), 0) == 1);
    auto measure = empirical_measure(table);
    REQUIRE(measure.atoms.size() == 2);
    CHECK(measure.atoms[0].h == 0);
    CHECK(measure.atoms[0].count == 1);
    CHECK(measure.atoms[1].h == 1);
    CHECK(measure.atoms[1].count == 1);
    // nu_1 = (delta_0 + delta_1) / 2.
    CHECK(measure.atoms[0].log_mass == doctest::Approx(std::log(0.5)));
}

TEST_CASE("table equals brute-force path enumeration") {
    for (int d : {1, 2}) {
        for (int n : {3, d == 1 ? 6 : 5}) {
            for (std::uint64_t seed : {11ull, 12ull, 13ull}) {
                LatticeEnvironment env(DistributionModel::bernoulli(0.5), d, n, seed);
                auto table = count_table(env, n);
                auto oracle = testing::enumerate_counts(env, n);
                u128 oracle_total = 0;
                for (const auto& [key, cnt] : oracle) {
                    CHECK(table.count(table.box.index_of(key.first), key.second) == cnt);
                    oracle_total += cnt;
                }
                CHECK(oracle_total == table.total_paths());
                // And nothing outside the oracle's support.
                u128 table_total = 0;
                for (auto c : table.weight_histogram()) table_total += c;
                CHECK(table_total == table.total_paths());
            }
        }
    }
}

TEST_CASE("total-count conservation up to n = 60 in d = 1") {
    LatticeEnvironment env(DistributionModel::bernoulli(0.5), 1, 60, 99);
    for (int n : {1, 7, 20, 41, 60}) {
        auto table = count_table(env, n);
        REQUIRE(table.exact);
        u128 total = 0;
        for (auto c : table.weight_histogram()) total += c;
        CHECK(total == table.total_paths());
    }
}

TEST_CASE("marginal over h gives binomial endpoint counts in d = 1") {
    LatticeEnvironment env(DistributionModel::bernoulli(0.5), 1, 12, 7);
    auto table = count_table(env, 12);
    auto endpoints = table.endpoint_counts();
    for (int x = -12; x <= 12; x += 2) {
        u128 binom = 1;
        for (int i = 0; i < (12 + x) / 2; ++i) {
            binom = binom * static_cast<unsigned>(12 - i) / static_cast<unsigned>(i + 1);
        }
        Site s{x};
        CHECK(endpoints[static_cast<std::size_t>(table.box.index_of(s))] == binom);
    }
}

TEST_CASE("non-integer weights are rejected with the offending site") {
    LatticeEnvironment env(DistributionModel::gaussian(0.0, 1.0), 1, 4, 5);
    CHECK_THROWS_WITH_AS(count_table(env, 4), doctest::Contains("non-integer weight"),
                         std::invalid_argument);
    // Quantized view is accepted.
    QuantizedView q(env, 0.01);
    CHECK_NOTHROW(count_table(q, 4));
}

TEST_CASE("threshold counts follow the two-sided definition") {
    ManualEnvironment env(1, 1);
    env.set(1, Site{1}, 1.0);
    auto table = count_table(env, 1);
    const double m = 0.5;
    // rho = 1 >= m: one path of weight 1.
    CHECK(count_threshold(table, 1.0, m) == 1);
    // all-zero at rho=0.5 > m=0: nothing reaches 0.5n.
    ManualEnvironment zero(1, 6);
    auto ztable = count_table(zero, 6);
    CHECK(count_threshold(ztable, 0.5, 0.0) == 0);
    // rho below the mean counts the lower tail.
    CHECK(count_threshold(table, 0.2, m) == 1);   // H <= 0.2: the 0-path
    CHECK(count_threshold(table, -0.5, m) == 0);  // H <= -0.5: none

    // Integer n*rho is inclusive on both sides.
    LatticeEnvironment renv(DistributionModel::bernoulli(0.5), 1, 8, 3);
    auto rtable = count_table(renv, 8);
    auto hist = rtable.weight_histogram();
    u128 upper_incl = 0;
    for (std::int64_t h = 4; h <= rtable.h_max; ++h) {
        if (h >= rtable.h_min) upper_incl += hist[static_cast<std::size_t>(h - rtable.h_min)];
    }
    CHECK(count_threshold(rtable, 0.5, 0.5) == upper_incl);  // n rho = 4 exactly
}

TEST_CASE("threshold identity N = (2d)^n nu[rho, inf)") {
    for (std::uint64_t seed : {21ull, 22ull}) {
        LatticeEnvironment env(DistributionModel::bernoulli(0.5), 1, 14, seed);
        auto table = count_table(env, 14);
        auto measure = empirical_measure(table);
        for (double rho : {0.5, 0.6, 0.75, 0.9}) {
            u128 from_measure = 0;
            for (const auto& atom : measure.atoms) {
                if (static_cast<double>(atom.h) >= 14.0 * rho) from_measure += atom.count;
            }
            CHECK(count_threshold(table, rho, 0.5) == from_measure);
        }
    }
}

TEST_CASE("partition identity: count route equals transfer route") {
    for (std::uint64_t seed : {31ull, 32ull, 33ull}) {
        LatticeEnvironment env(DistributionModel::bernoulli(0.5), 1, 20, seed);
        auto table = count_table(env, 20);
        for (double beta : {-3.0, -1.0, 0.0, 1.7, 3.0}) {
            auto rep = verify_partition_identity(table, env, beta);
            CHECK(std::fabs(rep.residual) < 1e-9);
            CHECK(rep.pass(1e-9));
        }
    }
    // All-ones environment: both sides are beta*n.
    ManualEnvironment ones(1, 10);
    ones.fill(1.0);
    auto table = count_table(ones, 10);
    for (double beta : {-2.0, 0.5, 4.0}) {
        auto rep = verify_partition_identity(table, ones, beta);
        CHECK(rep.lhs_log == doctest::Approx(10.0 * beta).epsilon(1e-10));
        CHECK(rep.rhs_log == doctest::Approx(10.0 * beta).epsilon(1e-10));
    }
}

TEST_CASE("tightness bound holds with explicit slack") {
    // All-zero: 1 <= 2.
    ManualEnvironment zero(1, 8);
    auto ztable = count_table(zero, 8);
    auto zrep = verify_tightness_bound(ztable, zero, 1.0);
    CHECK(zrep.lhs_log == doctest::Approx(0.0));
    CHECK(zrep.rhs_log == doctest::Approx(std::log(2.0)));
    CHECK(zrep.pass(1e-10));

    for (std::uint64_t seed : {41ull, 42ull}) {
        LatticeEnvironment env(DistributionModel::bernoulli(0.5), 1, 16, seed);
        auto table = count_table(env, 16);
        for (double beta : {0.5, 1.0, 2.0}) {
            CHECK(verify_tightness_bound(table, env, beta).pass(1e-10));
        }
    }

    // Symmetric two-point weights: inequality strict.
    LatticeEnvironment sym(DistributionModel::finite_discrete({-1.0, 1.0}, {0.5, 0.5}), 1, 12,
                           43);
    auto stable = count_table(sym, 12);
    auto srep = verify_tightness_bound(stable, sym, 1.0);
    CHECK(srep.slack > 0.0);
    CHECK_THROWS_AS(verify_tightness_bound(stable, sym, 0.0), std::invalid_argument);
}

TEST_CASE("quantization controls the partition function error") {
    LatticeEnvironment env(DistributionModel::gaussian(0.0, 1.0), 1, 12, 51);
    const double step = 0.01;
    QuantizedView q(env, step);
    CHECK(q.coupling_bound(20) == doctest::Approx(0.1));
    for (double beta : {0.5, 1.5}) {
        for (int n : {6, 12}) {
            double exact = partition_log(env, n, beta).log_z;
            // Quantized weights scaled back to real units: evaluate the integer
            // field at inverse temperature beta*step.
            double approx = partition_log(q, n, beta * step).log_z;
            CHECK(std::fabs(approx - exact) <= beta * n * step / 2.0 + 1e-9);
        }
    }
}

TEST_CASE("per-path quantization error bound") {
    LatticeEnvironment env(DistributionModel::gaussian(0.0, 1.0), 1, 20, 52);
    QuantizedView q(env, 0.01);
    testing::for_each_path(env, 6, [&](const std::vector<Site>& path, double h) {
        double hq = 0.0;
        for (int k = 1; k <= 6; ++k) hq += q.weight(k, path[static_cast<std::size_t>(k)]);
        CHECK(std::fabs(hq * 0.01 - h) <= 6 * 0.01 / 2.0 + 1e-12);
    });
}

TEST_CASE("approximate mode beyond the exact-count range") {
    // d=1, n=130: 2^130 exceeds the 128-bit budget, so the table flags itself.
    ManualEnvironment zero(1, 130);
    auto table = count_table(zero, 130);
    CHECK(!table.exact);
    auto measure = empirical_measure(table);
    REQUIRE(measure.atoms.size() == 1);
    CHECK(measure.atoms[0].log_mass == doctest::Approx(0.0).epsilon(1e-9));
    CHECK_THROWS_AS(count_threshold(table, 0.5, 0.0), std::logic_error);
    CHECK_THROWS_AS(table.total_paths(), std::logic_error);
}

TEST_CASE("n = 0 table is the origin atom") {
    LatticeEnvironment env(DistributionModel::bernoulli(0.5), 1, 1, 9);
    auto table = count_table(env, 0);
    CHECK(table.n == 0);
    CHECK(table.total_paths() == 1);
    Site origin{0};
    CHECK(table.count(table.box.index_of(origin), 0) == 1);
}

TEST_CASE("histogram CSV carries exact decimal counts") {
    ManualEnvironment env(1, 2);
    env.set(1, Site{1}, 1.0);
    env.set(2, Site{2}, 1.0);
    auto table = count_table(env, 2);
    auto csv = histogram_csv(table);
    CHECK(csv.find("h,count,log_mass\n") == 0);
    CHECK(csv.find("0,2,") != std::string::npos);  // two paths of weight 0
    CHECK(csv.find("2,1,") != std::string::npos);  // the up-up path
}
