#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "polylab/environment.hpp"
#include "polylab/lattice.hpp"
#include "polylab/numeric.hpp"
#include "polylab/transfer.hpp"

namespace polylab {

// Exact joint histogram of (endpoint, total weight) over all (2d)^n paths in
// an integer-weight environment: counts[x][h] = #{paths of length n ending at
// x with H_n = h}. Exact 128-bit integers while (2d)^n < 2^127; beyond that
// the recursion runs on log-counts and `exact` is false.
struct WeightCountTable {
    int n = 0;
    int d = 1;
    bool exact = true;
    LatticeBox box;             // radius n, relative to the path start
    std::int64_t h_min = 0;     // inclusive achievable weight window
    std::int64_t h_max = 0;
    std::vector<u128> counts;         // exact mode: box.size * h_size, row-major in h
    std::vector<double> log_counts;   // approximate mode, -inf for zero

    std::int64_t h_size() const { return h_max - h_min + 1; }

    u128 count(std::int64_t box_index, std::int64_t h) const {
        if (!exact) throw std::logic_error("WeightCountTable: exact counts unavailable");
        if (h < h_min || h > h_max) return 0;
        return counts[static_cast<std::size_t>(box_index * h_size() + (h - h_min))];
    }

    double log_count(std::int64_t box_index, std::int64_t h) const {
        if (h < h_min || h > h_max) return kNegInf;
        std::size_t at = static_cast<std::size_t>(box_index * h_size() + (h - h_min));
        return exact ? log_u128(counts[at]) : log_counts[at];
    }

    // Total number of paths, as a log; equals n*log(2d).
    double log_total_paths() const { return n * std::log(2.0 * d); }

    u128 total_paths() const {
        if (!exact) throw std::logic_error("WeightCountTable: exact counts unavailable");
        u128 t = 1;
        for (int i = 0; i < n; ++i) t *= static_cast<unsigned>(2 * d);
        return t;
    }

    // Sum of counts over endpoints, per weight value h (indexed from h_min).
    std::vector<u128> weight_histogram() const;
    std::vector<double> log_weight_histogram() const;

    // Marginal over h: number of walk paths per endpoint cell.
    std::vector<u128> endpoint_counts() const;
};

namespace detail {

template <EnvironmentLike V>
std::int64_t integer_weight(const V& env, int k, std::span<const std::int32_t> x) {
    double w = env.weight(k, x);
    double r = std::nearbyint(w);
    if (std::fabs(w - r) > 1e-9) {
        std::ostringstream os;
        os << "count_table: non-integer weight " << w << " at (k=" << k << ", x=(";
        for (std::size_t i = 0; i < x.size(); ++i) os << (i ? "," : "") << x[i];
        os << "))";
        throw std::invalid_argument(os.str());
    }
    return static_cast<std::int64_t>(r);
}

}  // namespace detail

// Builds the table by the recursion
//   C_k(x,h) = sum_{|y-x|=1} C_{k-1}(y, h - eta(k,x)).
template <EnvironmentLike V>
WeightCountTable count_table(const V& env, int n) {
    const int d = env.dimension();
    if (n < 0) throw std::invalid_argument("count_table: n must be nonnegative");
    if (n > env.horizon()) throw std::out_of_range("count_table: n exceeds environment horizon");

    WeightCountTable t;
    t.n = n;
    t.d = d;
    t.box = LatticeBox(d, n);
    t.exact = n * std::log2(2.0 * d) < 127.0 - 1e-9;

    // Slice 0: one path of weight 0 at the origin.
    std::int64_t lo = 0, hi = 0;
    std::vector<u128> cur;
    std::vector<double> log_cur;
    Site origin(static_cast<std::size_t>(d), 0);
    const std::int64_t origin_idx = t.box.index_of(origin);
    if (t.exact) {
        cur.assign(static_cast<std::size_t>(t.box.size), 0);
        cur[static_cast<std::size_t>(origin_idx)] = 1;
    } else {
        log_cur.assign(static_cast<std::size_t>(t.box.size), kNegInf);
        log_cur[static_cast<std::size_t>(origin_idx)] = 0.0;
    }

    std::vector<std::int64_t> slice_w(static_cast<std::size_t>(t.box.size), 0);
    for (int k = 1; k <= n; ++k) {
        // Weights and their range over the slice-k window.
        std::int64_t wmin = 0, wmax = 0;
        bool first = true;
        t.box.for_each_reachable(k, [&](std::span<const std::int32_t> x, std::int64_t idx) {
            std::int64_t w = detail::integer_weight(env, k, x);
            slice_w[static_cast<std::size_t>(idx)] = w;
            if (first) {
                wmin = wmax = w;
                first = false;
            } else {
                wmin = std::min(wmin, w);
                wmax = std::max(wmax, w);
            }
        });
        const std::int64_t new_lo = lo + wmin;
        const std::int64_t new_hi = hi + wmax;
        const std::int64_t old_size = hi - lo + 1;
        const std::int64_t new_size = new_hi - new_lo + 1;

        if (t.exact) {
            std::vector<u128> next(static_cast<std::size_t>(t.box.size * new_size), 0);
            t.box.for_each_reachable(k, [&](std::span<const std::int32_t> x, std::int64_t idx) {
                const std::int64_t w = slice_w[static_cast<std::size_t>(idx)];
                u128* dst = next.data() + idx * new_size + (lo + w - new_lo);
                for (int i = 0; i < d; ++i) {
                    const std::int64_t stride = t.box.strides[static_cast<std::size_t>(i)];
                    const std::int32_t c = x[static_cast<std::size_t>(i)];
                    for (int sgn : {+1, -1}) {
                        if (c + sgn > t.box.radius || c + sgn < -t.box.radius) continue;
                        const u128* src = cur.data() + (idx + sgn * stride) * old_size;
                        for (std::int64_t j = 0; j < old_size; ++j) dst[j] += src[j];
                    }
                }
            });
            cur = std::move(next);
        } else {
            std::vector<double> next(static_cast<std::size_t>(t.box.size * new_size), kNegInf);
            t.box.for_each_reachable(k, [&](std::span<const std::int32_t> x, std::int64_t idx) {
                const std::int64_t w = slice_w[static_cast<std::size_t>(idx)];
                double* dst = next.data() + idx * new_size + (lo + w - new_lo);
                for (int i = 0; i < d; ++i) {
                    const std::int64_t stride = t.box.strides[static_cast<std::size_t>(i)];
                    const std::int32_t c = x[static_cast<std::size_t>(i)];
                    for (int sgn : {+1, -1}) {
                        if (c + sgn > t.box.radius || c + sgn < -t.box.radius) continue;
                        const double* src = log_cur.data() + (idx + sgn * stride) * old_size;
                        for (std::int64_t j = 0; j < old_size; ++j) {
                            dst[j] = log_add_exp(dst[j], src[j]);
                        }
                    }
                }
            });
            log_cur = std::move(next);
        }
        lo = new_lo;
        hi = new_hi;
    }

    t.h_min = lo;
    t.h_max = hi;
    if (t.exact) {
        t.counts = std::move(cur);
    } else {
        t.log_counts = std::move(log_cur);
    }
    return t;
}

inline std::vector<u128> WeightCountTable::weight_histogram() const {
    if (!exact) throw std::logic_error("weight_histogram: exact counts unavailable");
    std::vector<u128> hist(static_cast<std::size_t>(h_size()), 0);
    const std::int64_t hs = h_size();
    for (std::int64_t cell = 0; cell < box.size; ++cell) {
        for (std::int64_t j = 0; j < hs; ++j) {
            hist[static_cast<std::size_t>(j)] += counts[static_cast<std::size_t>(cell * hs + j)];
        }
    }
    return hist;
}

inline std::vector<double> WeightCountTable::log_weight_histogram() const {
    const std::int64_t hs = h_size();
    std::vector<double> hist(static_cast<std::size_t>(hs), kNegInf);
    if (exact) {
        auto h = weight_histogram();
        for (std::int64_t j = 0; j < hs; ++j) hist[static_cast<std::size_t>(j)] = log_u128(h[static_cast<std::size_t>(j)]);
        return hist;
    }
    for (std::int64_t cell = 0; cell < box.size; ++cell) {
        for (std::int64_t j = 0; j < hs; ++j) {
            hist[static_cast<std::size_t>(j)] = log_add_exp(
                hist[static_cast<std::size_t>(j)], log_counts[static_cast<std::size_t>(cell * hs + j)]);
        }
    }
    return hist;
}

inline std::vector<u128> WeightCountTable::endpoint_counts() const {
    if (!exact) throw std::logic_error("endpoint_counts: exact counts unavailable");
    std::vector<u128> out(static_cast<std::size_t>(box.size), 0);
    const std::int64_t hs = h_size();
    for (std::int64_t cell = 0; cell < box.size; ++cell) {
        for (std::int64_t j = 0; j < hs; ++j) {
            out[static_cast<std::size_t>(cell)] += counts[static_cast<std::size_t>(cell * hs + j)];
        }
    }
    return out;
}

// nu_n: the distribution of H_n/n under the uniform path measure, carried as
// exact (count, (2d)^n) pairs plus a float log-mass.
struct EmpiricalMeasure {
    struct Atom {
        std::int64_t h = 0;    // total weight; the atom sits at h/n
        u128 count = 0;        // exact numerator (exact tables only)
        double log_mass = 0.0; // log(count) - n log(2d)
    };
    int n = 0;
    int d = 1;
    bool exact = true;
    std::vector<Atom> atoms;  // ascending in h, zero-count atoms omitted

    // In exact mode the atom masses sum to exactly 1: sum counts == (2d)^n.
    bool masses_sum_to_one(const WeightCountTable& table) const {
        if (!exact) return false;
        u128 s = 0;
        for (const auto& a : atoms) s += a.count;
        return s == table.total_paths();
    }
};

inline EmpiricalMeasure empirical_measure(const WeightCountTable& table) {
    EmpiricalMeasure m;
    m.n = table.n;
    m.d = table.d;
    m.exact = table.exact;
    const double log_paths = table.log_total_paths();
    if (table.exact) {
        auto hist = table.weight_histogram();
        for (std::int64_t j = 0; j < table.h_size(); ++j) {
            u128 c = hist[static_cast<std::size_t>(j)];
            if (c == 0) continue;
            m.atoms.push_back({table.h_min + j, c, log_u128(c) - log_paths});
        }
    } else {
        auto hist = table.log_weight_histogram();
        for (std::int64_t j = 0; j < table.h_size(); ++j) {
            double lc = hist[static_cast<std::size_t>(j)];
            if (lc == kNegInf) continue;
            m.atoms.push_back({table.h_min + j, 0, lc - log_paths});
        }
    }
    return m;
}

// N_n(rho): number of paths with H_n >= n*rho when rho >= m, and with
// H_n <= n*rho when rho < m. Integer thresholds are inclusive.
inline u128 count_threshold(const WeightCountTable& table, double rho, double mean) {
    if (!table.exact) throw std::logic_error("count_threshold: requires an exact table");
    auto hist = table.weight_histogram();
    const double t = static_cast<double>(table.n) * rho;
    u128 total = 0;
    if (rho >= mean) {
        const std::int64_t cut = static_cast<std::int64_t>(std::ceil(t));  // h >= t
        for (std::int64_t h = std::max(cut, table.h_min); h <= table.h_max; ++h) {
            total += hist[static_cast<std::size_t>(h - table.h_min)];
        }
    } else {
        const std::int64_t cut = static_cast<std::int64_t>(std::floor(t));  // h <= t
        for (std::int64_t h = table.h_min; h <= std::min(cut, table.h_max); ++h) {
            total += hist[static_cast<std::size_t>(h - table.h_min)];
        }
    }
    return total;
}

// Two independent routes to the same number: the exponential moment of nu_n
// against the transfer recursion, log integral e^{beta n x} dnu_n(x) versus
// log Z_n(beta).
struct IdentityReport {
    double lhs_log = 0.0;  // from the count table
    double rhs_log = 0.0;  // from the transfer recursion
    double residual = 0.0;

    bool pass(double tol) const { return std::fabs(residual) <= tol; }
};

template <EnvironmentLike V>
IdentityReport verify_partition_identity(const WeightCountTable& table, const V& env,
                                         double beta) {
    auto hist = table.log_weight_histogram();
    StreamingLogSumExp acc;
    for (std::int64_t j = 0; j < table.h_size(); ++j) {
        double lc = hist[static_cast<std::size_t>(j)];
        if (lc == kNegInf) continue;
        acc.add(lc - table.log_total_paths() + beta * static_cast<double>(table.h_min + j));
    }
    IdentityReport rep;
    rep.lhs_log = acc.value();
    rep.rhs_log = partition_log(env, table.n, beta).log_z;
    rep.residual = rep.lhs_log - rep.rhs_log;
    return rep;
}

// integral e^{beta n |x|} dnu_n <= Z_n(beta) + Z_n(-beta), from
// e^u + e^{-u} >= e^{|u|}.
struct TightnessReport {
    double lhs_log = 0.0;
    double rhs_log = 0.0;
    double slack = 0.0;  // rhs - lhs in log space

    bool pass(double tol) const { return slack >= -tol; }
};

template <EnvironmentLike V>
TightnessReport verify_tightness_bound(const WeightCountTable& table, const V& env,
                                       double beta) {
    if (!(beta > 0.0)) throw std::invalid_argument("verify_tightness_bound: beta must be > 0");
    auto hist = table.log_weight_histogram();
    StreamingLogSumExp acc;
    for (std::int64_t j = 0; j < table.h_size(); ++j) {
        double lc = hist[static_cast<std::size_t>(j)];
        if (lc == kNegInf) continue;
        acc.add(lc - table.log_total_paths() +
                beta * std::fabs(static_cast<double>(table.h_min + j)));
    }
    TightnessReport rep;
    rep.lhs_log = acc.value();
    rep.rhs_log = log_add_exp(partition_log(env, table.n, beta).log_z,
                              partition_log(env, table.n, -beta).log_z);
    rep.slack = rep.rhs_log - rep.lhs_log;
    return rep;
}

// CSV rows "h,count,log_mass" with exact counts as decimal strings.
std::string histogram_csv(const WeightCountTable& table);

}  // namespace polylab
