#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "polylab/numeric.hpp"

#include <nlohmann/json_fwd.hpp>

namespace polylab {

// Single-site weight law. Every variant has a finite log-MGF for all real
// arguments; validation happens at construction and the object is immutable
// afterwards.
class DistributionModel {
  public:
    struct Bernoulli {
        double p;  // in (0,1); weight is 1 with probability p, else 0
    };
    struct Gaussian {
        double mean;
        double variance;  // > 0
    };
    struct FiniteDiscrete {
        std::vector<double> values;  // distinct
        std::vector<double> probs;   // nonnegative, sum to 1 within 1e-12
    };

    static DistributionModel bernoulli(double p);
    static DistributionModel gaussian(double mean, double variance);
    static DistributionModel finite_discrete(std::vector<double> values,
                                             std::vector<double> probs);
    // Point mass at c, as a one-atom discrete law.
    static DistributionModel degenerate(double c);

    const Bernoulli* as_bernoulli() const { return std::get_if<Bernoulli>(&v_); }
    const Gaussian* as_gaussian() const { return std::get_if<Gaussian>(&v_); }
    const FiniteDiscrete* as_finite_discrete() const {
        return std::get_if<FiniteDiscrete>(&v_);
    }

    // Q[eta].
    double mean() const;
    // Smallest / largest value in the support (Gaussian: unbounded, throws).
    double support_min() const;
    double support_max() const;
    bool bounded_support() const;
    // True when every attainable weight is an integer.
    bool integer_valued() const;

    // Maps one uniform (0,1) variate to a weight by CDF inversion.
    double quantile(double u) const;

    std::string describe() const;

  private:
    explicit DistributionModel(Bernoulli b) : v_(b) {}
    explicit DistributionModel(Gaussian g) : v_(g) {}
    explicit DistributionModel(FiniteDiscrete f) : v_(std::move(f)) {}

    std::variant<Bernoulli, Gaussian, FiniteDiscrete> v_;
};

// lambda(beta) = log Q[e^{beta eta}], in closed form per variant.
double log_mgf(const DistributionModel& model, double beta);

// Legendre conjugate lambda*(rho) = sup_beta (rho beta - lambda(beta)).
// Closed form for Bernoulli and Gaussian; finite-discrete laws use
// golden-section maximization of the concave objective on beta in [-50, 50]
// (tolerance 1e-10) after the support test. Levels outside the support give
// the +infinity sentinel; support endpoints give -log(mass at endpoint).
ExtReal log_mgf_conjugate(const DistributionModel& model, double rho);

nlohmann::json model_to_json(const DistributionModel& model);
DistributionModel model_from_json(const nlohmann::json& j);

}  // namespace polylab
