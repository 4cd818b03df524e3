#include "polylab/smoothed.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "polylab/rng.hpp"

namespace polylab {

namespace {

constexpr double kDefaultQuantizeStep = 0.01;

struct ScaledTable {
    WeightCountTable table;
    double step = 0.0;  // 0 for native integer weights
};

// Exact table for integer-valued models; continuous models go through the
// lattice quantization with the default step.
ScaledTable model_table(const LatticeEnvironment& env, int n) {
    if (env.model().integer_valued()) {
        return {count_table(env, n), 0.0};
    }
    QuantizedView q(env, kDefaultQuantizeStep);
    return {count_table(q, n), kDefaultQuantizeStep};
}

}  // namespace

MeanSuperadditivityReport superadditivity_check_mean(const DistributionModel& model, int d,
                                                     int n, int m, double a, double b,
                                                     double lambda, int M,
                                                     std::uint64_t seed) {
    if (M < 2) throw std::invalid_argument("superadditivity_check_mean: M must be >= 2");
    if (n < 0 || m < 0) throw std::invalid_argument("superadditivity_check_mean: n, m >= 0");
    std::vector<double> joint(static_cast<std::size_t>(M));
    std::vector<double> head(static_cast<std::size_t>(M));
    std::vector<double> tail(static_cast<std::size_t>(M));
    const int horizon = std::max(n + m, 1);
    for (int rep = 0; rep < M; ++rep) {
        LatticeEnvironment env(model, d, horizon, rng::derive_seed(seed, rep));
        auto full = model_table(env, n + m);
        auto first = model_table(env, n);
        auto second = model_table(env, m);
        joint[static_cast<std::size_t>(rep)] =
            smoothed_value(full.table, lambda, a + b, full.step).value;
        head[static_cast<std::size_t>(rep)] =
            smoothed_value(first.table, lambda, a, first.step).value;
        tail[static_cast<std::size_t>(rep)] =
            smoothed_value(second.table, lambda, b, second.step).value;
    }
    MeanSuperadditivityReport rep;
    rep.joint = mean_se(joint);
    rep.head = mean_se(head);
    rep.tail = mean_se(tail);
    rep.pooled_se = std::sqrt(rep.joint.se * rep.joint.se + rep.head.se * rep.head.se +
                              rep.tail.se * rep.tail.se);
    return rep;
}

RateLambdaSequence rate_lambda_estimate(const DistributionModel& model, int d, double xi,
                                        double lambda, std::span<const int> n_list, int M,
                                        std::uint64_t seed) {
    if (M < 2) throw std::invalid_argument("rate_lambda_estimate: M must be >= 2");
    if (n_list.empty()) throw std::invalid_argument("rate_lambda_estimate: empty n list");
    RateLambdaSequence seq;
    seq.xi = xi;
    seq.lambda = lambda;
    const int n_max = *std::max_element(n_list.begin(), n_list.end());
    std::vector<std::vector<double>> samples(n_list.size(),
                                             std::vector<double>(static_cast<std::size_t>(M)));
    for (int rep = 0; rep < M; ++rep) {
        LatticeEnvironment env(model, d, n_max, rng::derive_seed(seed, rep));
        for (std::size_t ni = 0; ni < n_list.size(); ++ni) {
            auto st = model_table(env, n_list[ni]);
            samples[ni][static_cast<std::size_t>(rep)] =
                smoothed_value(st.table, lambda, n_list[ni] * xi, st.step).value;
        }
    }
    for (std::size_t ni = 0; ni < n_list.size(); ++ni) {
        MeanSe ms = mean_se(samples[ni]);
        RateLambdaSequence::Entry e;
        e.n = n_list[ni];
        e.estimate = -ms.mean / n_list[ni];
        e.se = ms.se / n_list[ni];
        seq.entries.push_back(e);
    }
    return seq;
}

ConcentrationReport concentration_experiment(const DistributionModel& model, int d, int n,
                                             double a, double lambda, int M,
                                             std::uint64_t seed,
                                             std::span<const double> u_grid) {
    if (M < 100) throw std::invalid_argument("concentration_experiment: M must be >= 100");
    std::vector<double> values(static_cast<std::size_t>(M));
    for (int rep = 0; rep < M; ++rep) {
        LatticeEnvironment env(model, d, n, rng::derive_seed(seed, rep));
        auto st = model_table(env, n);
        values[static_cast<std::size_t>(rep)] =
            smoothed_value(st.table, lambda, a, st.step).value;
    }
    MeanSe ms = mean_se(values);
    ConcentrationReport rep;
    rep.mean_v = ms.mean;
    rep.m_samples = M;
    for (double u : u_grid) {
        int hits = 0;
        for (double v : values) {
            if (std::fabs(v - ms.mean) >= u) ++hits;
        }
        ConcentrationReport::Entry e;
        e.u = u;
        e.empirical = static_cast<double>(hits) / M;
        e.bound_derived = 2.0 * std::exp(-u * u / (2.0 * lambda * lambda * n));
        e.bound_displayed = 2.0 * std::exp(-lambda * lambda * u * u / (2.0 * n));
        e.binomial_se = std::sqrt(e.empirical * (1.0 - e.empirical) / M);
        rep.entries.push_back(e);
    }
    return rep;
}

SandwichReport sandwich_bounds(const WeightCountTable& table, double xi, double delta,
                               double lambda, double quantize_step) {
    if (!(delta > 0.0)) throw std::invalid_argument("sandwich_bounds: delta must be > 0");
    if (!(lambda > 0.0)) throw std::invalid_argument("sandwich_bounds: lambda must be > 0");
    const double scale = quantize_step > 0.0 ? quantize_step : 1.0;
    const int n = table.n;
    const auto hist = table.log_weight_histogram();
    const double log_paths = table.log_total_paths();

    StreamingLogSumExp closed, open;
    for (std::int64_t j = 0; j < table.h_size(); ++j) {
        double lc = hist[static_cast<std::size_t>(j)];
        if (lc == kNegInf) continue;
        const double x = static_cast<double>(table.h_min + j) * scale / n;
        const double mass = lc - log_paths;
        if (x >= xi - delta && x <= xi + delta) closed.add(mass);
        if (x > xi - delta && x < xi + delta) open.add(mass);
    }

    SandwichReport rep;
    rep.smoothed = smoothed_value(table, lambda, n * xi, quantize_step).value;
    rep.log_nu_closed = closed.value();
    rep.log_upper = lambda * n * delta + rep.smoothed;
    rep.log_nu_open = open.value();
    rep.lower_linear = std::exp(rep.smoothed) - std::exp(-lambda * delta * n);
    rep.slack_upper = rep.log_upper - rep.log_nu_closed;
    const double nu_open = rep.log_nu_open == kNegInf ? 0.0 : std::exp(rep.log_nu_open);
    rep.slack_lower = nu_open - rep.lower_linear;
    return rep;
}

}  // namespace polylab
