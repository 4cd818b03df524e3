#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "polylab/free_energy.hpp"

using namespace polylab;

TEST_CASE("estimate at beta = 0 is identically zero") {
    auto bern = DistributionModel::bernoulli(0.5);
    std::vector<double> grid{-0.5, 0.0, 0.5};
    std::vector<int> ns{8};
    auto curve = estimate_free_energy(bern, 1, grid, ns, 10, 1);
    auto zero = curve.at(curve.beta_index(0.0), 0);
    CHECK(zero.mean == 0.0);
    CHECK(zero.se == 0.0);
    auto nonzero = curve.at(curve.beta_index(0.5), 0);
    CHECK(nonzero.se > 0.0);
}

TEST_CASE("jensen bound: estimate below the annealed curve") {
    auto bern = DistributionModel::bernoulli(0.5);
    std::vector<double> grid{1.0};
    std::vector<int> ns{32};
    auto curve = estimate_free_energy(bern, 1, grid, ns, 200, 97);
    const auto& est = curve.top(0);
    CHECK(est.mean <= log_mgf(bern, 1.0) + 3.0 * est.se);
    auto gaps = jensen_gap(curve);
    REQUIRE(gaps.size() == 1);
    CHECK(gaps[0].gap == doctest::Approx(curve.lambda_values[0] - est.mean));
}

TEST_CASE("growth in n: mean(2n) above mean(n) within noise") {
    auto bern = DistributionModel::bernoulli(0.5);
    std::vector<double> grid{1.5};
    std::vector<int> ns{16, 32};
    auto curve = estimate_free_energy(bern, 1, grid, ns, 150, 11);
    const auto& small = curve.at(0, 0);
    const auto& large = curve.at(0, 1);
    double pooled = std::sqrt(small.se * small.se + large.se * large.se);
    CHECK(large.mean >= small.mean - 3.0 * pooled);
}

TEST_CASE("curve is convex in beta within pooled noise") {
    auto bern = DistributionModel::bernoulli(0.5);
    std::vector<double> grid;
    for (double b = -2.0; b <= 2.0 + 1e-12; b += 0.5) grid.push_back(b);
    std::vector<int> ns{24};
    auto curve = estimate_free_energy(bern, 1, grid, ns, 80, 13);
    for (std::size_t i = 0; i + 2 < grid.size(); ++i) {
        const auto &e0 = curve.top(i), &e1 = curve.top(i + 1), &e2 = curve.top(i + 2);
        double second = e0.mean - 2.0 * e1.mean + e2.mean;
        double pooled = std::sqrt(e0.se * e0.se + 4.0 * e1.se * e1.se + e2.se * e2.se);
        CHECK(second >= -3.0 * pooled - 1e-12);
    }
}

TEST_CASE("symmetric law gives a symmetric curve") {
    auto sym = DistributionModel::finite_discrete({-1.0, 1.0}, {0.5, 0.5});
    std::vector<double> grid{-1.5, -0.75, 0.75, 1.5};
    std::vector<int> ns{20};
    auto curve = estimate_free_energy(sym, 1, grid, ns, 120, 17);
    for (std::size_t i = 0; i < 2; ++i) {
        const auto& neg = curve.top(i);
        const auto& pos = curve.top(grid.size() - 1 - i);
        double pooled = std::sqrt(neg.se * neg.se + pos.se * pos.se);
        CHECK(std::fabs(neg.mean - pos.mean) <= 3.0 * pooled);
    }
}

TEST_CASE("slope at zero recovers the mean weight") {
    auto bern = DistributionModel::bernoulli(0.3);
    const double h = 0.05;
    std::vector<double> grid{-h, h};
    std::vector<int> ns{32};
    auto curve = estimate_free_energy(bern, 1, grid, ns, 150, 19);
    const auto& lo = curve.top(0);
    const auto& hi = curve.top(1);
    double slope = (hi.mean - lo.mean) / (2.0 * h);
    double se = std::sqrt(lo.se * lo.se + hi.se * hi.se) / (2.0 * h);
    CHECK(std::fabs(slope - 0.3) <= 3.0 * se + 0.01);  // small curvature bias at finite h
}

TEST_CASE("critical region scan flags beta = 0 and not strong disorder") {
    auto bern = DistributionModel::bernoulli(0.5);
    std::vector<double> grid{0.0, 2.0};
    std::vector<int> ns{32};
    auto curve = estimate_free_energy(bern, 1, grid, ns, 200, 23);
    auto flagged = critical_region_scan(curve, 1e-6);
    REQUIRE(!flagged.empty());
    CHECK(flagged.front() == 0.0);
    // d = 1 at beta = 2: the gap is far beyond noise.
    for (double b : flagged) CHECK(b != 2.0);
    auto gaps = jensen_gap(curve);
    CHECK(gaps[1].gap > 3.0 * gaps[1].se);
}

TEST_CASE("common random numbers reuse the same environments across beta") {
    // With one replica the curve is a deterministic function of the seed, and
    // evaluating a beta twice in different grids gives identical numbers.
    auto bern = DistributionModel::bernoulli(0.5);
    std::vector<int> ns{12};
    std::vector<double> g1{0.7, 1.1};
    std::vector<double> g2{0.3, 1.1};
    auto c1 = estimate_free_energy(bern, 1, g1, ns, 2, 31);
    auto c2 = estimate_free_energy(bern, 1, g2, ns, 2, 31);
    CHECK(c1.at(1, 0).mean == c2.at(1, 0).mean);
}

TEST_CASE("csv export is well-formed") {
    auto bern = DistributionModel::bernoulli(0.5);
    std::vector<double> grid{0.0, 1.0};
    std::vector<int> ns{4, 8};
    auto curve = estimate_free_energy(bern, 1, grid, ns, 5, 37);
    auto csv = curve_csv(curve);
    CHECK(csv.rfind("beta,n,M,mean,se,lambda\n", 0) == 0);
    // header + 4 rows
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);
}

TEST_CASE("input validation") {
    auto bern = DistributionModel::bernoulli(0.5);
    std::vector<double> grid{0.0, 1.0};
    std::vector<int> ns{4};
    CHECK_THROWS_AS(estimate_free_energy(bern, 1, grid, ns, 1, 1), std::invalid_argument);
    std::vector<double> unsorted{1.0, 0.0};
    CHECK_THROWS_AS(estimate_free_energy(bern, 1, unsorted, ns, 5, 1), std::invalid_argument);
    std::vector<int> bad_ns{8, 4};
    CHECK_THROWS_AS(estimate_free_energy(bern, 1, grid, bad_ns, 5, 1), std::invalid_argument);
    std::vector<double> empty;
    CHECK_THROWS_AS(estimate_free_energy(bern, 1, empty, ns, 5, 1), std::invalid_argument);
}
