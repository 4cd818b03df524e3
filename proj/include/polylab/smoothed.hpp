#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "polylab/count.hpp"
#include "polylab/distribution.hpp"
#include "polylab/environment.hpp"
#include "polylab/lattice.hpp"
#include "polylab/numeric.hpp"

namespace polylab {

// V_n(a) = log P[e^{-lambda |H_n - a|}] evaluated exactly from a count
// table. Always <= 0, and lambda-Lipschitz in the center a. For quantized
// environments the weight of atom h is h*weight_scale and the attached
// quantization error bounds |V(quantized) - V(exact)|.
struct SmoothedValue {
    double lambda = 0.0;
    int n = 0;
    double center = 0.0;
    double value = 0.0;
    double quantization_error = 0.0;
};

inline SmoothedValue smoothed_value(const WeightCountTable& table, double lambda, double a,
                                    double quantize_step = 0.0) {
    if (!(lambda > 0.0)) throw std::invalid_argument("smoothed_value: lambda must be > 0");
    const double scale = quantize_step > 0.0 ? quantize_step : 1.0;
    auto hist = table.log_weight_histogram();
    StreamingLogSumExp acc;
    for (std::int64_t j = 0; j < table.h_size(); ++j) {
        double lc = hist[static_cast<std::size_t>(j)];
        if (lc == kNegInf) continue;
        const double h = static_cast<double>(table.h_min + j) * scale;
        acc.add(lc - table.log_total_paths() - lambda * std::fabs(h - a));
    }
    SmoothedValue v;
    v.lambda = lambda;
    v.n = table.n;
    v.center = a;
    v.value = acc.value();
    v.quantization_error = quantize_step > 0.0 ? 0.5 * lambda * table.n * quantize_step : 0.0;
    return v;
}

// Endpoint measure tilted by the smoothing kernel:
// sigma_n(y) = P[e^{-lambda|H_n - b|} 1{S_n = y}] / P[e^{-lambda|H_n - b|}],
// normalized by the exponential moment so the masses sum to 1.
struct SigmaMeasure {
    int n = 0;
    double b = 0.0;
    double lambda = 0.0;
    std::vector<Site> sites;
    std::vector<double> prob;

    double prob_at(std::span<const std::int32_t> x) const {
        for (std::size_t i = 0; i < sites.size(); ++i) {
            if (std::equal(sites[i].begin(), sites[i].end(), x.begin(), x.end())) {
                return prob[i];
            }
        }
        return 0.0;
    }
};

inline SigmaMeasure sigma_measure(const WeightCountTable& table, double b, double lambda,
                                  double quantize_step = 0.0) {
    if (!(lambda > 0.0)) throw std::invalid_argument("sigma_measure: lambda must be > 0");
    const double scale = quantize_step > 0.0 ? quantize_step : 1.0;
    SigmaMeasure s;
    s.n = table.n;
    s.b = b;
    s.lambda = lambda;
    std::vector<double> row_log;
    const std::int64_t hs = table.h_size();
    table.box.for_each_reachable(table.n, [&](std::span<const std::int32_t> x, std::int64_t idx) {
        StreamingLogSumExp acc;
        for (std::int64_t j = 0; j < hs; ++j) {
            double lc = table.log_count(idx, table.h_min + j);
            if (lc == kNegInf) continue;
            const double h = static_cast<double>(table.h_min + j) * scale;
            acc.add(lc - lambda * std::fabs(h - b));
        }
        s.sites.emplace_back(x.begin(), x.end());
        row_log.push_back(acc.value());
    });
    const double total = log_sum_exp(row_log);
    s.prob.resize(row_log.size());
    for (std::size_t i = 0; i < row_log.size(); ++i) {
        s.prob[i] = row_log[i] == kNegInf ? 0.0 : std::exp(row_log[i] - total);
    }
    return s;
}

template <EnvironmentLike V>
SigmaMeasure sigma_measure(const V& env, int n, double b, double lambda) {
    return sigma_measure(count_table(env, n), b, lambda);
}

// Both sides of the segment-gluing chain, evaluated exactly for one
// environment:
//   V_{n+m}(a+b)  >=  log sum_y sigma-numerator(y) e^{V_m(y-shifted, a)}
//                 >=  V_n(b) + sum_y sigma_n(y) V_m(y-shifted, a).
struct SuperadditivityReport {
    double lhs = 0.0;     // V_{n+m}(a+b)
    double middle = 0.0;  // exact joint expectation over glued segments
    double rhs = 0.0;     // V_n(b) + sigma-average of shifted V_m(a)
    double v_n_b = 0.0;

    double slack() const { return lhs - rhs; }
    bool pass(double tol) const {
        return lhs >= middle - tol && middle >= rhs - tol;
    }
};

template <EnvironmentLike V>
SuperadditivityReport superadditivity_check_pathwise(const V& env, int n, int m, double a,
                                                     double b, double lambda) {
    if (n + m > env.horizon()) {
        throw std::out_of_range("superadditivity_check_pathwise: window smaller than n+m");
    }
    SuperadditivityReport rep;
    rep.lhs = smoothed_value(count_table(env, n + m), lambda, a + b).value;

    const WeightCountTable head = count_table(env, n);
    const std::int64_t hs = head.h_size();
    const double log_paths_n = head.log_total_paths();

    std::vector<double> num_log;     // log P[e^{-lambda|H_n-b|} 1{S_n=y}]
    std::vector<double> tail_value;  // V_m(a) over the environment shifted to (n, y)
    head.box.for_each_reachable(n, [&](std::span<const std::int32_t> x, std::int64_t idx) {
        StreamingLogSumExp acc;
        for (std::int64_t j = 0; j < hs; ++j) {
            double lc = head.log_count(idx, head.h_min + j);
            if (lc == kNegInf) continue;
            acc.add(lc - lambda * std::fabs(static_cast<double>(head.h_min + j) - b));
        }
        num_log.push_back(acc.value() - log_paths_n);
        auto shifted = translate(env, n, Site(x.begin(), x.end()));
        tail_value.push_back(smoothed_value(count_table(shifted, m), lambda, a).value);
    });

    rep.v_n_b = log_sum_exp(num_log);
    StreamingLogSumExp joint;
    double sigma_avg = 0.0;
    for (std::size_t i = 0; i < num_log.size(); ++i) {
        if (num_log[i] == kNegInf) continue;
        joint.add(num_log[i] + tail_value[i]);
        sigma_avg += std::exp(num_log[i] - rep.v_n_b) * tail_value[i];
    }
    rep.middle = joint.value();
    rep.rhs = rep.v_n_b + sigma_avg;
    return rep;
}

// Monte Carlo estimate of the mean inequality v_{n+m}(a+b) >= v_n(a) + v_m(b).
struct MeanSuperadditivityReport {
    MeanSe joint;   // v_{n+m}(a+b)
    MeanSe head;    // v_n(a)
    MeanSe tail;    // v_m(b)
    double pooled_se = 0.0;

    double slack() const { return joint.mean - head.mean - tail.mean; }
    bool pass(double k_sigma = 3.0) const { return slack() >= -k_sigma * pooled_se; }
};

MeanSuperadditivityReport superadditivity_check_mean(const DistributionModel& model, int d,
                                                     int n, int m, double a, double b,
                                                     double lambda, int M, std::uint64_t seed);

// The subadditive sequence -v_n(n*xi)/n, whose every term lies above its
// limit; the last entry is the running estimate of that limit.
struct RateLambdaSequence {
    double xi = 0.0;
    double lambda = 0.0;
    struct Entry {
        int n = 0;
        double estimate = 0.0;  // -mean V_n(n xi)/n
        double se = 0.0;
    };
    std::vector<Entry> entries;

    double limit_estimate() const { return entries.back().estimate; }
    double limit_se() const { return entries.back().se; }
    // Every term must sit above the final term, within the pooled noise.
    bool trend_ok(double k_sigma = 3.0) const {
        for (const auto& e : entries) {
            if (e.estimate - entries.back().estimate <
                -k_sigma * (e.se + entries.back().se)) {
                return false;
            }
        }
        return true;
    }
};

RateLambdaSequence rate_lambda_estimate(const DistributionModel& model, int d, double xi,
                                        double lambda, std::span<const int> n_list, int M,
                                        std::uint64_t seed);

// Empirical dispersion of V_n(0,a) across environments against the
// concentration bound 2 exp(-u^2 / (2 lambda^2 n)) implied by the
// lambda*sqrt(n) Lipschitz constant. The displayed alternative curve
// 2 exp(-lambda^2 u^2 / (2n)) is reported alongside but not enforced.
struct ConcentrationReport {
    double mean_v = 0.0;
    int m_samples = 0;
    struct Entry {
        double u = 0.0;
        double empirical = 0.0;
        double bound_derived = 0.0;
        double bound_displayed = 0.0;
        double binomial_se = 0.0;

        bool pass(double k_sigma = 3.0) const {
            return empirical <= bound_derived + k_sigma * binomial_se;
        }
    };
    std::vector<Entry> entries;

    bool pass(double k_sigma = 3.0) const {
        for (const auto& e : entries) {
            if (!e.pass(k_sigma)) return false;
        }
        return true;
    }
};

ConcentrationReport concentration_experiment(const DistributionModel& model, int d, int n,
                                             double a, double lambda, int M,
                                             std::uint64_t seed,
                                             std::span<const double> u_grid);

// Exact two-sided control of the mass nu_n puts near xi:
//   (i)  nu_n([xi-d, xi+d])  <= e^{lambda n d} P[e^{-lambda|H_n - n xi|}]
//   (ii) nu_n((xi-d, xi+d))  >= P[e^{-lambda|H_n - n xi|}] - e^{-lambda d n}
struct SandwichReport {
    double log_nu_closed = 0.0;
    double log_upper = 0.0;      // lambda n delta + V
    double log_nu_open = 0.0;
    double lower_linear = 0.0;   // e^V - e^{-lambda delta n}, may be negative
    double smoothed = 0.0;       // V_n(n xi)

    double slack_upper = 0.0;  // log_upper - log_nu_closed
    double slack_lower = 0.0;  // nu_open - lower_linear
    bool pass(double tol) const { return slack_upper >= -tol && slack_lower >= -tol; }
};

SandwichReport sandwich_bounds(const WeightCountTable& table, double xi, double delta,
                               double lambda, double quantize_step = 0.0);

}  // namespace polylab
