#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "polylab/distribution.hpp"
#include "polylab/numeric.hpp"

namespace polylab {

// Monte Carlo estimates of (1/n) Q[log Z_n(beta)] on a beta grid, for a
// list of horizons, with the annealed curve lambda(beta) alongside. The
// same M environments back every grid point (common random numbers), and
// replica seeds derive from the master seed, so the whole curve is
// reproducible from one integer.
struct FreeEnergyCurve {
    DistributionModel model;
    int d = 1;
    std::vector<double> beta_grid;  // sorted
    std::vector<int> n_list;        // ascending
    int m_samples = 0;
    std::uint64_t master_seed = 0;

    // estimates[bi][ni] for beta_grid[bi], n_list[ni]
    std::vector<std::vector<MeanSe>> estimates;
    std::vector<double> lambda_values;

    int largest_n() const { return n_list.back(); }
    const MeanSe& at(std::size_t beta_index, std::size_t n_index) const {
        return estimates[beta_index][n_index];
    }
    // Estimate at the largest horizon.
    const MeanSe& top(std::size_t beta_index) const {
        return estimates[beta_index].back();
    }
    std::size_t beta_index(double beta) const;
};

FreeEnergyCurve estimate_free_energy(const DistributionModel& model, int d,
                                     std::span<const double> beta_grid,
                                     std::span<const int> n_list, int M,
                                     std::uint64_t master_seed);

// lambda(beta) - estimate at the largest horizon, per beta.
struct JensenGapEntry {
    double beta = 0.0;
    double estimate = 0.0;
    double se = 0.0;
    double lambda = 0.0;
    double gap = 0.0;  // lambda - estimate
};

std::vector<JensenGapEntry> jensen_gap(const FreeEnergyCurve& curve);

// Betas where the estimate is consistent with the annealed value at the
// largest horizon: |gap| <= max(tol, 3 se). A finite-n heuristic, not a
// statement about the limit.
std::vector<double> critical_region_scan(const FreeEnergyCurve& curve, double tol);

// CSV rows "beta,n,M,mean,se,lambda".
std::string curve_csv(const FreeEnergyCurve& curve);

}  // namespace polylab
