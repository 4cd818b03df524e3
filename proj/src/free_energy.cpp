#include "polylab/free_energy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "polylab/environment.hpp"
#include "polylab/rng.hpp"
#include "polylab/transfer.hpp"

namespace polylab {

std::size_t FreeEnergyCurve::beta_index(double beta) const {
    for (std::size_t i = 0; i < beta_grid.size(); ++i) {
        if (beta_grid[i] == beta) return i;
    }
    throw std::invalid_argument("FreeEnergyCurve: beta not on the grid");
}

FreeEnergyCurve estimate_free_energy(const DistributionModel& model, int d,
                                     std::span<const double> beta_grid,
                                     std::span<const int> n_list, int M,
                                     std::uint64_t master_seed) {
    if (M < 2) throw std::invalid_argument("estimate_free_energy: M must be >= 2");
    if (beta_grid.empty()) throw std::invalid_argument("estimate_free_energy: empty beta grid");
    if (n_list.empty()) throw std::invalid_argument("estimate_free_energy: empty n list");
    if (!std::is_sorted(beta_grid.begin(), beta_grid.end())) {
        throw std::invalid_argument("estimate_free_energy: beta grid must be sorted");
    }
    for (std::size_t i = 0; i < n_list.size(); ++i) {
        if (n_list[i] < 1 || (i > 0 && n_list[i] <= n_list[i - 1])) {
            throw std::invalid_argument("estimate_free_energy: n list must be ascending and >= 1");
        }
    }

    FreeEnergyCurve curve{model, d, {beta_grid.begin(), beta_grid.end()},
                          {n_list.begin(), n_list.end()}, M, master_seed,
                          {}, {}};
    const int n_max = curve.n_list.back();

    // samples[bi][ni][replica]; replica index fixes the aggregation order.
    std::vector<std::vector<std::vector<double>>> samples(
        beta_grid.size(),
        std::vector<std::vector<double>>(n_list.size(), std::vector<double>(M, 0.0)));

    for (int rep = 0; rep < M; ++rep) {
        LatticeEnvironment env(model, d, n_max, rng::derive_seed(master_seed, rep));
        for (std::size_t bi = 0; bi < beta_grid.size(); ++bi) {
            if (beta_grid[bi] == 0.0) continue;  // Z_n(0) = 1 identically
            auto log_zs = partition_log_multi(env, n_list, beta_grid[bi]);
            for (std::size_t ni = 0; ni < n_list.size(); ++ni) {
                samples[bi][ni][rep] = log_zs[ni] / n_list[ni];
            }
        }
    }

    curve.estimates.resize(beta_grid.size());
    curve.lambda_values.resize(beta_grid.size());
    for (std::size_t bi = 0; bi < beta_grid.size(); ++bi) {
        curve.lambda_values[bi] = log_mgf(model, beta_grid[bi]);
        curve.estimates[bi].resize(n_list.size());
        for (std::size_t ni = 0; ni < n_list.size(); ++ni) {
            curve.estimates[bi][ni] = mean_se(samples[bi][ni]);
        }
    }
    return curve;
}

std::vector<JensenGapEntry> jensen_gap(const FreeEnergyCurve& curve) {
    std::vector<JensenGapEntry> out;
    out.reserve(curve.beta_grid.size());
    for (std::size_t bi = 0; bi < curve.beta_grid.size(); ++bi) {
        const MeanSe& est = curve.top(bi);
        JensenGapEntry e;
        e.beta = curve.beta_grid[bi];
        e.estimate = est.mean;
        e.se = est.se;
        e.lambda = curve.lambda_values[bi];
        e.gap = e.lambda - est.mean;
        out.push_back(e);
    }
    return out;
}

std::vector<double> critical_region_scan(const FreeEnergyCurve& curve, double tol) {
    std::vector<double> flagged;
    for (const auto& e : jensen_gap(curve)) {
        if (std::fabs(e.gap) <= std::max(tol, 3.0 * e.se)) flagged.push_back(e.beta);
    }
    return flagged;
}

std::string curve_csv(const FreeEnergyCurve& curve) {
    std::string out = "beta,n,M,mean,se,lambda\n";
    char buf[256];
    for (std::size_t bi = 0; bi < curve.beta_grid.size(); ++bi) {
        for (std::size_t ni = 0; ni < curve.n_list.size(); ++ni) {
            const MeanSe& est = curve.estimates[bi][ni];
            std::snprintf(buf, sizeof(buf), "%.17g,%d,%d,%.17g,%.17g,%.17g\n",
                          curve.beta_grid[bi], curve.n_list[ni], curve.m_samples, est.mean,
                          est.se, curve.lambda_values[bi]);
            out += buf;
        }
    }
    return out;
}

}  // namespace polylab
