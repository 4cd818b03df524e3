#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "polylab/environment.hpp"
#include "polylab/lattice.hpp"
#include "polylab/numeric.hpp"

namespace polylab {

// One space-time slice of the tilted walk: L_k(x) = log E[e^{beta H_k} 1{S_k = x}]
// under simple random walk from the origin. Sites outside the reachable
// cone hold -inf. At beta = 0 the slice masses sum to 1.
struct SliceWeights {
    int k = 0;
    double beta = 0.0;
    LatticeBox box;
    std::vector<double> log_values;

    double log_total() const { return log_sum_exp(log_values); }
};

struct EndpointDistribution {
    int n = 0;
    double beta = 0.0;
    std::vector<Site> sites;
    std::vector<double> prob;  // aligned with sites, sums to 1

    double prob_at(std::span<const std::int32_t> x) const {
        for (std::size_t i = 0; i < sites.size(); ++i) {
            if (std::equal(sites[i].begin(), sites[i].end(), x.begin(), x.end())) {
                return prob[i];
            }
        }
        return 0.0;
    }
};

struct PartitionResult {
    double log_z = 0.0;
    int n = 0;
    double beta = 0.0;
    std::optional<EndpointDistribution> endpoint;
};

namespace detail {

// Runs the recursion L_k(x) = beta*eta(k,x) + log[(2d)^{-1} sum_{|y-x|=1} e^{L_{k-1}(y)}]
// from L_0 = {origin: 0} up to slice n, with per-site max-shifted sums.
// per_slice(k, values) fires after every slice, including k = 0.
template <EnvironmentLike V, class SliceFn>
SliceWeights run_transfer(const V& env, int n, double beta, SliceFn&& per_slice) {
    const int d = env.dimension();
    if (n < 0) throw std::invalid_argument("transfer: n must be nonnegative");
    if (n > env.horizon()) throw std::out_of_range("transfer: n exceeds environment horizon");

    LatticeBox box(d, n);
    std::vector<double> cur(static_cast<std::size_t>(box.size), kNegInf);
    std::vector<double> next(static_cast<std::size_t>(box.size), kNegInf);
    Site origin(static_cast<std::size_t>(d), 0);
    cur[static_cast<std::size_t>(box.index_of(origin))] = 0.0;
    per_slice(0, std::span<const double>(cur));

    const double log_2d = std::log(2.0 * d);
    for (int k = 1; k <= n; ++k) {
        box.for_each_reachable(k, [&](std::span<const std::int32_t> x, std::int64_t idx) {
            double m = kNegInf;
            for (int i = 0; i < d; ++i) {
                const std::int64_t stride = box.strides[static_cast<std::size_t>(i)];
                const std::int32_t c = x[static_cast<std::size_t>(i)];
                if (c + 1 <= box.radius) m = std::max(m, cur[static_cast<std::size_t>(idx + stride)]);
                if (c - 1 >= -box.radius) m = std::max(m, cur[static_cast<std::size_t>(idx - stride)]);
            }
            if (m == kNegInf) {
                next[static_cast<std::size_t>(idx)] = kNegInf;
                return;
            }
            double s = 0.0;
            for (int i = 0; i < d; ++i) {
                const std::int64_t stride = box.strides[static_cast<std::size_t>(i)];
                const std::int32_t c = x[static_cast<std::size_t>(i)];
                if (c + 1 <= box.radius) {
                    double v = cur[static_cast<std::size_t>(idx + stride)];
                    if (v != kNegInf) s += std::exp(v - m);
                }
                if (c - 1 >= -box.radius) {
                    double v = cur[static_cast<std::size_t>(idx - stride)];
                    if (v != kNegInf) s += std::exp(v - m);
                }
            }
            next[static_cast<std::size_t>(idx)] =
                beta * env.weight(k, x) + m - log_2d + std::log(s);
        });
        // `next` previously held slice k-2, whose support is contained in the
        // cells just written, so after the swap `cur` is exactly slice k.
        std::swap(cur, next);
        per_slice(k, std::span<const double>(cur));
    }

    SliceWeights out;
    out.k = n;
    out.beta = beta;
    out.box = box;
    out.log_values = std::move(cur);
    return out;
}

}  // namespace detail

// Final slice of the tilted-walk recursion.
template <EnvironmentLike V>
SliceWeights transfer_slices(const V& env, int n, double beta) {
    return detail::run_transfer(env, n, beta, [](int, std::span<const double>) {});
}

// log Z_n(beta) = log sum_x e^{L_n(x)}; optionally the endpoint law of the
// polymer measure, mu_n(S_n = x) = e^{L_n(x)} / Z_n.
template <EnvironmentLike V>
PartitionResult partition_log(const V& env, int n, double beta, bool want_endpoint = false) {
    SliceWeights slice = transfer_slices(env, n, beta);
    PartitionResult res;
    res.n = n;
    res.beta = beta;
    res.log_z = slice.log_total();
    if (want_endpoint) {
        EndpointDistribution ep;
        ep.n = n;
        ep.beta = beta;
        slice.box.for_each_reachable(n, [&](std::span<const std::int32_t> x, std::int64_t idx) {
            double lv = slice.log_values[static_cast<std::size_t>(idx)];
            ep.sites.emplace_back(x.begin(), x.end());
            ep.prob.push_back(lv == kNegInf ? 0.0 : std::exp(lv - res.log_z));
        });
        res.endpoint = std::move(ep);
    }
    return res;
}

// log Z_n(beta) for every n in checkpoints (ascending), from a single sweep.
template <EnvironmentLike V>
std::vector<double> partition_log_multi(const V& env, std::span<const int> checkpoints,
                                        double beta) {
    if (checkpoints.empty()) return {};
    for (std::size_t i = 0; i + 1 < checkpoints.size(); ++i) {
        if (checkpoints[i] >= checkpoints[i + 1]) {
            throw std::invalid_argument("partition_log_multi: checkpoints must be ascending");
        }
    }
    std::vector<double> out;
    out.reserve(checkpoints.size());
    std::size_t want = 0;
    detail::run_transfer(env, checkpoints.back(), beta,
                         [&](int k, std::span<const double> values) {
                             if (want < checkpoints.size() && k == checkpoints[want]) {
                                 out.push_back(log_sum_exp(values));
                                 ++want;
                             }
                         });
    return out;
}

template <EnvironmentLike V>
EndpointDistribution endpoint_distribution(const V& env, int n, double beta) {
    return *partition_log(env, n, beta, true).endpoint;
}

// H_n(omega, eta) for an explicit path; the path includes the start site
// omega_0 = 0 and must take nearest-neighbour steps.
template <EnvironmentLike V>
double path_weight(const V& env, std::span<const Site> path) {
    if (path.empty()) return 0.0;
    const int d = env.dimension();
    if (static_cast<int>(path.front().size()) != d || l1_norm(path.front()) != 0) {
        throw std::invalid_argument("path_weight: path must start at the origin");
    }
    if (static_cast<int>(path.size()) - 1 > env.horizon()) {
        throw std::out_of_range("path_weight: path longer than environment horizon");
    }
    double h = 0.0;
    for (std::size_t k = 1; k < path.size(); ++k) {
        int step = 0;
        for (int i = 0; i < d; ++i) {
            step += std::abs(path[k][static_cast<std::size_t>(i)] -
                             path[k - 1][static_cast<std::size_t>(i)]);
        }
        if (step != 1) {
            throw std::invalid_argument("path_weight: steps must have |omega_k - omega_{k-1}|_1 = 1");
        }
        h += env.weight(static_cast<int>(k), path[k]);
    }
    return h;
}

// log Z_n by explicit enumeration of all (2d)^n paths. Enumeration oracle
// for the recursion; refuses beyond 1e7 paths.
template <EnvironmentLike V>
double brute_force_partition(const V& env, int n, double beta) {
    const int d = env.dimension();
    if (n < 0) throw std::invalid_argument("brute_force_partition: n must be nonnegative");
    if (n > env.horizon()) throw std::out_of_range("brute_force_partition: n exceeds horizon");
    if (n * std::log(2.0 * d) > std::log(1e7)) {
        throw std::invalid_argument("brute_force_partition: (2d)^n exceeds the enumeration bound");
    }
    if (n == 0) return 0.0;

    StreamingLogSumExp acc;
    Site pos(static_cast<std::size_t>(d), 0);
    std::function<void(int, double)> walk = [&](int k, double h) {
        if (k == n) {
            acc.add(beta * h);
            return;
        }
        for (int i = 0; i < d; ++i) {
            for (int sgn : {+1, -1}) {
                pos[static_cast<std::size_t>(i)] += sgn;
                walk(k + 1, h + env.weight(k + 1, pos));
                pos[static_cast<std::size_t>(i)] -= sgn;
            }
        }
    };
    walk(0, 0.0);
    return acc.value() - n * std::log(2.0 * d);
}

// max over paths of H_n, by the tropical recursion
// M_k(x) = eta(k,x) + max_{|y-x|=1} M_{k-1}(y).
template <EnvironmentLike V>
double max_path_weight(const V& env, int n) {
    const int d = env.dimension();
    if (n < 0) throw std::invalid_argument("max_path_weight: n must be nonnegative");
    if (n > env.horizon()) throw std::out_of_range("max_path_weight: n exceeds horizon");
    if (n == 0) return 0.0;

    LatticeBox box(d, n);
    std::vector<double> cur(static_cast<std::size_t>(box.size), kNegInf);
    std::vector<double> next(static_cast<std::size_t>(box.size), kNegInf);
    Site origin(static_cast<std::size_t>(d), 0);
    cur[static_cast<std::size_t>(box.index_of(origin))] = 0.0;

    for (int k = 1; k <= n; ++k) {
        box.for_each_reachable(k, [&](std::span<const std::int32_t> x, std::int64_t idx) {
            double m = kNegInf;
            for (int i = 0; i < d; ++i) {
                const std::int64_t stride = box.strides[static_cast<std::size_t>(i)];
                const std::int32_t c = x[static_cast<std::size_t>(i)];
                if (c + 1 <= box.radius) m = std::max(m, cur[static_cast<std::size_t>(idx + stride)]);
                if (c - 1 >= -box.radius) m = std::max(m, cur[static_cast<std::size_t>(idx - stride)]);
            }
            next[static_cast<std::size_t>(idx)] = (m == kNegInf) ? kNegInf : env.weight(k, x) + m;
        });
        std::swap(cur, next);
    }
    double best = kNegInf;
    for (double v : cur) best = std::max(best, v);
    return best;
}

}  // namespace polylab
