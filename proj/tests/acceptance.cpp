// Acceptance suite: every criterion prints one PASS/FAIL line with its
// elapsed time. Tolerances and parameter choices are fixed here, not
// configurable.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <chrono>
#include <cmath>
#include <cstdio>

#include "polylab/conjugate.hpp"
#include "polylab/count.hpp"
#include "polylab/environment.hpp"
#include "polylab/experiment.hpp"
#include "polylab/free_energy.hpp"
#include "polylab/rng.hpp"
#include "polylab/smoothed.hpp"
#include "polylab/transfer.hpp"
#include "support/enumeration.hpp"

using namespace polylab;

namespace {

class Stopwatch {
  public:
    Stopwatch() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

  private:
    std::chrono::steady_clock::time_point start_;
};

void report(int number, const char* label, bool ok, double seconds) {
    std::printf("%s criterion %2d: %s (%.2f s)\n", ok ? "PASS" : "FAIL", number, label, seconds);
    std::fflush(stdout);
    CHECK_MESSAGE(ok, "criterion ", number, ": ", label);
}

const auto kBernoulli = DistributionModel::bernoulli(0.5);

}  // namespace

TEST_CASE("criterion 1: partition identity is exact at finite n") {
    Stopwatch timer;
    bool ok = true;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        LatticeEnvironment env(kBernoulli, 1, 40, rng::derive_seed(101, seed));
        for (int n : {10, 20, 40}) {
            auto table = count_table(env, n);
            for (double beta : {-2.0, -0.5, 0.0, 1.0, 3.0}) {
                auto rep = verify_partition_identity(table, env, beta);
                ok = ok && std::fabs(rep.residual) < 1e-9;
            }
        }
    }
    double elapsed = timer.seconds();
    ok = ok && elapsed < 10.0;
    report(1, "partition identity residual < 1e-9 (runtime < 10 s)", ok, elapsed);
}

TEST_CASE("criterion 2: recursion outputs equal full path enumeration") {
    Stopwatch timer;
    bool ok = true;
    for (int d : {1, 2}) {
        for (std::uint64_t seed = 0; seed < 25; ++seed) {
            LatticeEnvironment env(kBernoulli, d, 8, rng::derive_seed(202, 100 * d + seed));
            for (int n = 0; n <= 8; ++n) {
                const double beta[2] = {-1.3, 0.8};
                const double lambda[2] = {0.7, 2.0};
                const double a = 0.4 * n + 0.3;
                const double b = 0.5 * n - 0.7;

                // One enumeration pass feeds every oracle.
                StreamingLogSumExp z[2];
                std::map<std::pair<Site, std::int64_t>, std::uint64_t> counts;
                StreamingLogSumExp smoothed_acc[2];
                std::map<Site, double> sigma_numer;
                double sigma_total = 0.0;
                testing::for_each_path(env, n, [&](const std::vector<Site>& path, double h) {
                    for (int i = 0; i < 2; ++i) z[i].add(beta[i] * h);
                    counts[{path.back(), static_cast<std::int64_t>(std::llround(h))}] += 1;
                    for (int i = 0; i < 2; ++i) smoothed_acc[i].add(-lambda[i] * std::fabs(h - a));
                    double w = std::exp(-lambda[1] * std::fabs(h - b));
                    sigma_numer[path.back()] += w;
                    sigma_total += w;
                });
                const double log_paths = n * std::log(2.0 * d);

                for (int i = 0; i < 2; ++i) {
                    double fast = partition_log(env, n, beta[i]).log_z;
                    ok = ok && std::fabs(fast - (z[i].value() - log_paths)) < 1e-10;
                }
                auto table = count_table(env, n);
                u128 total = 0;
                for (const auto& [key, cnt] : counts) {
                    ok = ok && table.count(table.box.index_of(key.first), key.second) == cnt;
                    total += cnt;
                }
                ok = ok && total == table.total_paths();
                for (int i = 0; i < 2; ++i) {
                    double fast = smoothed_value(table, lambda[i], a).value;
                    ok = ok && std::fabs(fast - (smoothed_acc[i].value() - log_paths)) < 1e-10;
                }
                auto sigma = sigma_measure(table, b, lambda[1]);
                for (const auto& [site, numer] : sigma_numer) {
                    ok = ok && std::fabs(sigma.prob_at(site) - numer / sigma_total) < 1e-10;
                }
            }
        }
    }
    double elapsed = timer.seconds();
    ok = ok && elapsed < 60.0;
    report(2, "transfer/count/smoothed/sigma match enumeration within 1e-10 (runtime < 60 s)",
           ok, elapsed);
}

TEST_CASE("criterion 3: quenched estimates respect the annealed bound") {
    Stopwatch timer;
    bool ok = true;
    std::vector<double> grid;
    for (double b = -3.0; b <= 3.0 + 1e-12; b += 0.25) grid.push_back(b);
    std::vector<int> ns{64};
    for (const auto& model : {kBernoulli, DistributionModel::gaussian(0.0, 1.0)}) {
        auto curve = estimate_free_energy(model, 1, grid, ns, 200, 303);
        for (const auto& e : jensen_gap(curve)) {
            ok = ok && e.estimate <= e.lambda + 3.0 * e.se;
        }
    }
    double elapsed = timer.seconds();
    ok = ok && elapsed < 120.0;
    report(3, "Jensen bound at every beta in [-3,3] (runtime < 2 min)", ok, elapsed);
}

TEST_CASE("criterion 4: pathwise gluing inequality on 100 random cases") {
    Stopwatch timer;
    bool ok = true;
    rng::SequentialRng gen(404);
    for (int c = 0; c < 100; ++c) {
        const int d = (c % 4 == 3) ? 2 : 1;
        const int n = gen.next_int(1, d == 1 ? 10 : 5);
        const int m = gen.next_int(1, d == 1 ? 10 : 5);
        const double a = gen.next_in(-1.0, m + 1.0);
        const double b = gen.next_in(-1.0, n + 1.0);
        const double lambda = std::vector<double>{0.5, 1.0, 5.0}[c % 3];
        LatticeEnvironment env(kBernoulli, d, n + m, rng::derive_seed(404, c));
        auto rep = superadditivity_check_pathwise(env, n, m, a, b, lambda);
        ok = ok && rep.lhs >= rep.middle - 1e-9 && rep.middle >= rep.rhs - 1e-9;
    }
    report(4, "pathwise superadditivity chain, LHS >= RHS - 1e-9 in all 100 cases", ok,
           timer.seconds());
}

TEST_CASE("criterion 5: sandwich bounds on 100 random cases") {
    Stopwatch timer;
    bool ok = true;
    rng::SequentialRng gen(505);
    for (int c = 0; c < 100; ++c) {
        const int n = gen.next_int(4, 30);
        const double xi = gen.next_in(-0.2, 1.2);
        const double delta = std::vector<double>{0.05, 0.1, 0.2}[c % 3];
        const double lambda = std::vector<double>{1.0, 5.0, 20.0}[(c / 3) % 3];
        LatticeEnvironment env(kBernoulli, 1, n, rng::derive_seed(505, c));
        auto rep = sandwich_bounds(count_table(env, n), xi, delta, lambda);
        ok = ok && rep.slack_upper >= -1e-9 && rep.slack_lower >= -1e-9;
    }
    report(5, "two-sided sandwich inequalities hold in all 100 cases", ok, timer.seconds());
}

TEST_CASE("criterion 6: V is nonpositive and Lipschitz on 1000 center pairs") {
    Stopwatch timer;
    bool ok = true;
    rng::SequentialRng gen(606);
    for (int t = 0; t < 4; ++t) {
        LatticeEnvironment env(kBernoulli, 1, 16, rng::derive_seed(606, t));
        auto table = count_table(env, 16);
        for (int c = 0; c < 250; ++c) {
            const double lambda = std::vector<double>{0.5, 1.0, 2.0, 5.0}[c % 4];
            const double a = gen.next_in(-6.0, 22.0);
            const double a2 = gen.next_in(-6.0, 22.0);
            const double va = smoothed_value(table, lambda, a).value;
            const double vb = smoothed_value(table, lambda, a2).value;
            ok = ok && va <= 0.0 && vb <= 0.0;
            ok = ok && std::fabs(va - vb) <= lambda * std::fabs(a - a2) + 1e-10;
        }
    }
    report(6, "smoothed functional: V <= 0 and lambda-Lipschitz on 1000 pairs", ok,
           timer.seconds());
}

TEST_CASE("criterion 7: concentration tails below the derived bound") {
    Stopwatch timer;
    const double us[] = {1.0, 2.0, 4.0, 8.0};
    auto rep = concentration_experiment(kBernoulli, 1, 16, 0.5 * 16, 1.0, 1000, 707, us);
    bool ok = true;
    for (const auto& e : rep.entries) {
        ok = ok && e.empirical <= e.bound_derived + 3.0 * e.binomial_se;
    }
    double elapsed = timer.seconds();
    ok = ok && elapsed < 60.0;
    report(7, "empirical tails below 2 exp(-u^2/(2 lambda^2 n)) + 3 se (runtime < 1 min)", ok,
           elapsed);
}

TEST_CASE("criterion 8: Legendre round trips") {
    Stopwatch timer;
    bool ok = true;
    std::vector<double> grid;
    for (double b = -5.0; b <= 5.0 + 1e-12; b += 0.01) grid.push_back(b);
    for (const auto& model : {kBernoulli, DistributionModel::gaussian(0.0, 1.0)}) {
        std::vector<double> values;
        for (double b : grid) values.push_back(log_mgf(model, b));
        auto rate = legendre(grid, values);
        // Interior 80% of the validity interval.
        const double len = rate.rho_hi - rate.rho_lo;
        const double lo = rate.rho_lo + 0.1 * len;
        const double hi = rate.rho_hi - 0.1 * len;
        for (double rho = lo; rho <= hi + 1e-12; rho += len / 50.0) {
            auto closed = log_mgf_conjugate(model, rho);
            if (!closed.is_finite()) continue;
            ok = ok && std::fabs(rate.value_at(rho).value - closed.value()) < 1e-3;
        }
        // Double conjugation reproduces the convex input within 2 grid steps.
        auto back = legendre(rate.rho, rate.value);
        for (double b = -4.0; b <= 4.0 + 1e-12; b += 0.25) {
            ok = ok && std::fabs(back.value_at(b).value - log_mgf(model, b)) <= 2.0 * 0.01;
        }
    }
    report(8, "grid conjugate matches closed forms (1e-3) and double-conjugates back", ok,
           timer.seconds());
}

TEST_CASE("criterion 9: threshold-count growth approaches the rate target") {
    Stopwatch timer;
    std::vector<double> grid;
    for (double b = -1.0; b <= 4.0 + 1e-12; b += 0.25) grid.push_back(b);
    std::vector<int> ns{64};
    auto curve = estimate_free_energy(kBernoulli, 1, grid, ns, 200, 909);
    auto rate = rate_from_curve(curve);
    std::vector<int> horizons{16, 32, 64};
    auto rep = corollary_check(kBernoulli, 1, 0.75, horizons, 50, 909, rate);
    bool ok = rep.trend_nonincreasing();
    ok = ok && rep.rows.back().abs_diff < 0.1;
    for (const auto& row : rep.rows) ok = ok && row.zero_count == 0;
    double elapsed = timer.seconds();
    ok = ok && elapsed < 300.0;
    char label[160];
    std::snprintf(label, sizeof(label),
                  "corollary trend %.4f -> %.4f -> %.4f, target gap < 0.1 (runtime < 5 min)",
                  rep.rows[0].abs_diff, rep.rows[1].abs_diff, rep.rows[2].abs_diff);
    report(9, label, ok, elapsed);
}

TEST_CASE("criterion 10: smoothed rate estimates increase with lambda") {
    Stopwatch timer;
    bool ok = true;
    std::vector<int> ns{16, 32};
    for (double xi : {0.6, 0.75}) {
        std::vector<RateLambdaSequence> seqs;
        for (double lambda : {0.5, 1.0, 2.0, 4.0}) {
            seqs.push_back(rate_lambda_estimate(kBernoulli, 1, xi, lambda, ns, 100, 1010));
        }
        for (std::size_t i = 0; i + 1 < seqs.size(); ++i) {
            double pooled = std::sqrt(seqs[i].limit_se() * seqs[i].limit_se() +
                                      seqs[i + 1].limit_se() * seqs[i + 1].limit_se());
            ok = ok && seqs[i + 1].limit_estimate() >= seqs[i].limit_estimate() - 3.0 * pooled;
        }
    }
    report(10, "I^(lambda) estimates nondecreasing in lambda (shared seeds, 3 se)", ok,
           timer.seconds());
}

TEST_CASE("criterion 11: disorder contrast between d=1 and d=3") {
    Stopwatch timer;
    bool ok = true;
    std::vector<int> ns{32};

    std::vector<double> strong{2.0};
    auto d1 = estimate_free_energy(kBernoulli, 1, strong, ns, 200, 1111);
    auto g1 = jensen_gap(d1).front();
    ok = ok && g1.gap > 3.0 * g1.se;

    std::vector<double> weak{0.1};
    auto d3 = estimate_free_energy(kBernoulli, 3, weak, ns, 200, 1111);
    auto g3 = jensen_gap(d3).front();
    ok = ok && std::fabs(g3.gap) <= 3.0 * g3.se;

    double elapsed = timer.seconds();
    ok = ok && elapsed < 600.0;
    char label[160];
    std::snprintf(label, sizeof(label),
                  "d=1 gap %.4f > 3se=%.4f; d=3 gap %.5f <= 3se=%.5f (runtime < 10 min)",
                  g1.gap, 3.0 * g1.se, g3.gap, 3.0 * g3.se);
    report(11, label, ok, elapsed);
}

TEST_CASE("criterion 12: verify suite passes on the default seed") {
    Stopwatch timer;
    auto checks = verify_suite(kDefaultVerifySeed);
    bool ok = checks.size() >= 12;
    for (const auto& c : checks) ok = ok && c.pass;
    report(12, "full verify suite deterministic pass", ok, timer.seconds());
}
