#include "polylab/conjugate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "polylab/count.hpp"
#include "polylab/environment.hpp"
#include "polylab/rng.hpp"
#include "polylab/transfer.hpp"

namespace polylab {

RateFunctionGrid::PointValue RateFunctionGrid::value_at(double level) const {
    PointValue pv;
    double best = kNegInf;
    for (std::size_t i = 0; i < source_beta.size(); ++i) {
        double cand = level * source_beta[i] - source_value[i];
        if (cand > best) {
            best = cand;
            pv.argmax = i;
        }
    }
    pv.value = best;
    pv.se = source_se.empty() ? 0.0 : source_se[pv.argmax];
    pv.extrapolated = level < rho_lo || level > rho_hi;
    return pv;
}

RateFunctionGrid legendre(std::span<const double> beta_grid, std::span<const double> values,
                          std::span<const double> value_se, std::span<const double> rho_grid,
                          std::string source_label) {
    if (beta_grid.size() < 2) {
        throw std::invalid_argument("legendre: need at least 2 grid points");
    }
    if (values.size() != beta_grid.size()) {
        throw std::invalid_argument("legendre: values and grid sizes differ");
    }
    if (!value_se.empty() && value_se.size() != values.size()) {
        throw std::invalid_argument("legendre: se and grid sizes differ");
    }
    for (std::size_t i = 0; i + 1 < beta_grid.size(); ++i) {
        if (!(beta_grid[i] < beta_grid[i + 1])) {
            throw std::invalid_argument("legendre: beta grid must be strictly increasing");
        }
    }
    for (double v : values) {
        if (!std::isfinite(v)) throw std::invalid_argument("legendre: values must be finite");
    }

    RateFunctionGrid rate;
    rate.source_beta.assign(beta_grid.begin(), beta_grid.end());
    rate.source_value.assign(values.begin(), values.end());
    rate.source_se.assign(value_se.begin(), value_se.end());
    rate.source_label = std::move(source_label);

    // Validity interval: the secant slope range of the source curve.
    double smin = kNegInf, smax = kNegInf;
    for (std::size_t i = 0; i + 1 < beta_grid.size(); ++i) {
        double s = (values[i + 1] - values[i]) / (beta_grid[i + 1] - beta_grid[i]);
        if (i == 0) {
            smin = smax = s;
        } else {
            smin = std::min(smin, s);
            smax = std::max(smax, s);
        }
    }
    rate.rho_lo = smin;
    rate.rho_hi = smax;

    if (rho_grid.empty()) {
        // Default resolution matches the slope spacing of the source curve.
        std::size_t points = std::max<std::size_t>(beta_grid.size(), 2);
        rate.rho.resize(points);
        for (std::size_t i = 0; i < points; ++i) {
            rate.rho[i] = smin + (smax - smin) * static_cast<double>(i) /
                                     static_cast<double>(points - 1);
        }
    } else {
        rate.rho.assign(rho_grid.begin(), rho_grid.end());
    }

    rate.value.resize(rate.rho.size());
    rate.se.resize(rate.rho.size());
    rate.extrapolated.resize(rate.rho.size());
    for (std::size_t i = 0; i < rate.rho.size(); ++i) {
        auto pv = rate.value_at(rate.rho[i]);
        rate.value[i] = pv.value;
        rate.se[i] = pv.se;
        rate.extrapolated[i] = pv.extrapolated ? 1 : 0;
    }
    return rate;
}

RateFunctionGrid rate_from_curve(const FreeEnergyCurve& curve,
                                 std::span<const double> rho_grid) {
    std::vector<double> values(curve.beta_grid.size());
    std::vector<double> ses(curve.beta_grid.size());
    for (std::size_t bi = 0; bi < curve.beta_grid.size(); ++bi) {
        values[bi] = curve.top(bi).mean;
        ses[bi] = curve.top(bi).se;
    }
    char label[128];
    std::snprintf(label, sizeof(label), "free-energy curve, n=%d, M=%d", curve.largest_n(),
                  curve.m_samples);
    return legendre(curve.beta_grid, values, ses, rho_grid, label);
}

std::vector<VSetEntry> v_set_scan(const RateFunctionGrid& rate, const DistributionModel& model,
                                  double tol) {
    std::vector<VSetEntry> out;
    out.reserve(rate.rho.size());
    for (std::size_t i = 0; i < rate.rho.size(); ++i) {
        VSetEntry e;
        e.rho = rate.rho[i];
        e.rate = rate.value[i];
        e.annealed_rate = log_mgf_conjugate(model, e.rho);
        if (e.annealed_rate.is_finite()) {
            double gap = std::fabs(e.rate - e.annealed_rate.value());
            e.flagged = gap <= std::max(tol, rate.se[i]);
        }
        out.push_back(e);
    }
    return out;
}

RhoPmReport rho_pm(const FreeEnergyCurve& curve, int n, int M, std::uint64_t seed) {
    RhoPmReport rep;
    rep.beta_max = curve.beta_grid.back();
    rep.beta_min = curve.beta_grid.front();
    rep.support_bounded = curve.model.bounded_support();
    if (!(rep.beta_max > 0.0) || !(rep.beta_min < 0.0)) {
        throw std::invalid_argument("rho_pm: curve must span negative and positive beta");
    }
    rep.plus_from_curve = curve.top(curve.beta_grid.size() - 1).mean / rep.beta_max;
    rep.minus_from_curve = curve.top(0).mean / (-rep.beta_min);

    std::vector<double> plus(static_cast<std::size_t>(M));
    std::vector<double> minus(static_cast<std::size_t>(M));
    for (int rep_i = 0; rep_i < M; ++rep_i) {
        LatticeEnvironment env(curve.model, curve.d, n,
                               rng::derive_seed(seed, static_cast<std::uint64_t>(rep_i)));
        plus[static_cast<std::size_t>(rep_i)] = max_path_weight(env, n) / n;
        minus[static_cast<std::size_t>(rep_i)] = max_path_weight(NegatedView(env), n) / n;
    }
    rep.plus_direct = mean_se(plus);
    rep.minus_direct = mean_se(minus);
    return rep;
}

CorollaryReport corollary_check(const DistributionModel& model, int d, double rho,
                                std::span<const int> n_list, int M, std::uint64_t seed,
                                const RateFunctionGrid& rate) {
    if (!model.integer_valued()) {
        throw std::invalid_argument("corollary_check: requires an integer-weight model");
    }
    CorollaryReport rep;
    rep.rho = rho;
    auto pv = rate.value_at(rho);
    rep.rate_value = pv.value;
    rep.rate_se = pv.se;
    rep.target = std::log(2.0 * d) - pv.value;

    const double mean_w = model.mean();
    for (int n : n_list) {
        CorollaryReport::Row row;
        row.n = n;
        std::vector<double> vals;
        for (int rep_i = 0; rep_i < M; ++rep_i) {
            LatticeEnvironment env(model, d, n,
                                   rng::derive_seed(seed, static_cast<std::uint64_t>(rep_i)));
            u128 count = count_threshold(count_table(env, n), rho, mean_w);
            if (count == 0) {
                ++row.zero_count;
            } else {
                vals.push_back(log_u128(count) / n);
            }
        }
        MeanSe ms = mean_se(vals);
        row.samples = static_cast<int>(vals.size());
        row.mean = ms.mean;
        row.se = ms.se;
        row.abs_diff = std::fabs(ms.mean - rep.target);
        rep.rows.push_back(row);
    }
    return rep;
}

std::string rate_csv(const RateFunctionGrid& rate) {
    std::string out = "rho,I,se,extrapolated\n";
    char buf[160];
    for (std::size_t i = 0; i < rate.rho.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%d\n", rate.rho[i], rate.value[i],
                      rate.se[i], static_cast<int>(rate.extrapolated[i]));
        out += buf;
    }
    return out;
}

}  // namespace polylab
