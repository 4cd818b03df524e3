#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "polylab/distribution.hpp"
#include "polylab/free_energy.hpp"
#include "polylab/numeric.hpp"

namespace polylab {

// Grid Legendre conjugate of a convex curve: I(rho) = max_i (rho*beta_i - v_i),
// with no smoothing or fitting. Valid levels are the secant-slope range of
// the source; outside it the sup saturates at an endpoint and the entry is
// flagged extrapolated. The propagated error of I(rho) is the source error
// at the maximizing beta.
struct RateFunctionGrid {
    std::vector<double> rho;
    std::vector<double> value;
    std::vector<double> se;
    std::vector<std::uint8_t> extrapolated;
    double rho_lo = 0.0;  // validity interval = secant slope range
    double rho_hi = 0.0;

    std::vector<double> source_beta;
    std::vector<double> source_value;
    std::vector<double> source_se;
    std::string source_label;

    struct PointValue {
        double value = 0.0;
        double se = 0.0;
        std::size_t argmax = 0;
        bool extrapolated = false;
    };
    PointValue value_at(double level) const;
};

RateFunctionGrid legendre(std::span<const double> beta_grid, std::span<const double> values,
                          std::span<const double> value_se = {},
                          std::span<const double> rho_grid = {},
                          std::string source_label = "");

// Conjugate of the free-energy curve at its largest horizon.
RateFunctionGrid rate_from_curve(const FreeEnergyCurve& curve,
                                 std::span<const double> rho_grid = {});

// Levels where the quenched rate agrees with the annealed conjugate,
// |I(rho) - lambda*(rho)| <= max(tol, propagated se). Finite-n heuristic.
struct VSetEntry {
    double rho = 0.0;
    double rate = 0.0;
    ExtReal annealed_rate = ExtReal::infinity();
    bool flagged = false;
};

std::vector<VSetEntry> v_set_scan(const RateFunctionGrid& rate, const DistributionModel& model,
                                  double tol);

// Extremal growth rates of +-H_n/n: the curve-slope estimator p(beta)/beta at
// the grid ends, next to the direct tropical-recursion estimator, with the
// gap between them. For unbounded weight laws the limits are infinite and
// the slope estimate keeps growing with beta_max; `support_bounded` is false
// then and the numbers are snapshots at this beta_max, not limit claims.
struct RhoPmReport {
    double beta_max = 0.0;
    double beta_min = 0.0;
    bool support_bounded = true;
    double plus_from_curve = 0.0;
    double minus_from_curve = 0.0;
    MeanSe plus_direct;
    MeanSe minus_direct;

    double plus_gap() const { return plus_from_curve - plus_direct.mean; }
    double minus_gap() const { return minus_from_curve - minus_direct.mean; }
};

RhoPmReport rho_pm(const FreeEnergyCurve& curve, int n, int M, std::uint64_t seed);

// Growth-rate check for the threshold counts: compares mean (1/n) log N_n(rho)
// against log(2d) - I(rho) across horizons. Environments where N_n = 0 are
// tallied separately, never averaged as -inf.
struct CorollaryReport {
    double rho = 0.0;
    double rate_value = 0.0;  // I(rho) estimate used for the target
    double rate_se = 0.0;
    double target = 0.0;  // log(2d) - I(rho)
    struct Row {
        int n = 0;
        int samples = 0;     // environments with N_n > 0
        int zero_count = 0;  // environments with N_n = 0
        double mean = 0.0;   // mean of (1/n) log N_n over nonzero samples
        double se = 0.0;
        double abs_diff = 0.0;  // |mean - target|
    };
    std::vector<Row> rows;

    bool trend_nonincreasing(double slack = 0.0) const {
        for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
            if (rows[i + 1].abs_diff > rows[i].abs_diff + slack) return false;
        }
        return true;
    }
};

CorollaryReport corollary_check(const DistributionModel& model, int d, double rho,
                                std::span<const int> n_list, int M, std::uint64_t seed,
                                const RateFunctionGrid& rate);

// CSV rows "rho,I,se,extrapolated".
std::string rate_csv(const RateFunctionGrid& rate);

}  // namespace polylab
