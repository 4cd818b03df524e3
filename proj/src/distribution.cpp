#include "polylab/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "polylab/rng.hpp"

namespace polylab {

namespace {

// log(1 - p + p e^b) without overflow for large |b|.
double bernoulli_log_mgf(double p, double b) {
    if (b <= 0.0) {
        return std::log1p(p * std::expm1(b));
    }
    // Factor out e^b: log(e^b (p + (1-p) e^{-b})).
    return b + std::log1p((1.0 - p) * std::expm1(-b));
}

double xlogy(double x, double y) { return x == 0.0 ? 0.0 : x * std::log(y); }

}  // namespace

DistributionModel DistributionModel::bernoulli(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        throw std::invalid_argument("Bernoulli: p must lie in (0,1)");
    }
    return DistributionModel(Bernoulli{p});
}

DistributionModel DistributionModel::gaussian(double mean, double variance) {
    if (!(variance > 0.0)) {
        throw std::invalid_argument("Gaussian: variance must be positive");
    }
    if (!std::isfinite(mean) || !std::isfinite(variance)) {
        throw std::invalid_argument("Gaussian: parameters must be finite");
    }
    return DistributionModel(Gaussian{mean, variance});
}

DistributionModel DistributionModel::finite_discrete(std::vector<double> values,
                                                     std::vector<double> probs) {
    if (values.empty() || values.size() != probs.size()) {
        throw std::invalid_argument(
            "FiniteDiscrete: values and probs must be nonempty and equally sized");
    }
    double total = 0.0;
    for (double p : probs) {
        if (!(p >= 0.0)) {
            throw std::invalid_argument("FiniteDiscrete: probabilities must be nonnegative");
        }
        total += p;
    }
    if (std::fabs(total - 1.0) > 1e-12) {
        throw std::invalid_argument("FiniteDiscrete: probabilities must sum to 1");
    }
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i])) {
            throw std::invalid_argument("FiniteDiscrete: values must be finite");
        }
        for (std::size_t j = i + 1; j < values.size(); ++j) {
            if (values[i] == values[j]) {
                throw std::invalid_argument("FiniteDiscrete: values must be distinct");
            }
        }
    }
    return DistributionModel(FiniteDiscrete{std::move(values), std::move(probs)});
}

DistributionModel DistributionModel::degenerate(double c) {
    return finite_discrete({c}, {1.0});
}

double DistributionModel::mean() const {
    if (auto* b = as_bernoulli()) return b->p;
    if (auto* g = as_gaussian()) return g->mean;
    const auto& f = std::get<FiniteDiscrete>(v_);
    double m = 0.0;
    for (std::size_t i = 0; i < f.values.size(); ++i) m += f.values[i] * f.probs[i];
    return m;
}

bool DistributionModel::bounded_support() const { return as_gaussian() == nullptr; }

double DistributionModel::support_min() const {
    if (as_bernoulli()) return 0.0;
    if (auto* f = as_finite_discrete()) {
        return *std::min_element(f->values.begin(), f->values.end());
    }
    throw std::logic_error("support_min: unbounded support");
}

double DistributionModel::support_max() const {
    if (as_bernoulli()) return 1.0;
    if (auto* f = as_finite_discrete()) {
        return *std::max_element(f->values.begin(), f->values.end());
    }
    throw std::logic_error("support_max: unbounded support");
}

bool DistributionModel::integer_valued() const {
    if (as_bernoulli()) return true;
    if (auto* f = as_finite_discrete()) {
        for (double v : f->values) {
            if (std::fabs(v - std::nearbyint(v)) > 1e-9) return false;
        }
        return true;
    }
    return false;
}

double DistributionModel::quantile(double u) const {
    if (auto* b = as_bernoulli()) {
        return (u < 1.0 - b->p) ? 0.0 : 1.0;
    }
    if (auto* g = as_gaussian()) {
        return g->mean + std::sqrt(g->variance) * rng::normal_quantile(u);
    }
    const auto& f = std::get<FiniteDiscrete>(v_);
    double cum = 0.0;
    for (std::size_t i = 0; i + 1 < f.values.size(); ++i) {
        cum += f.probs[i];
        if (u < cum) return f.values[i];
    }
    return f.values.back();
}

std::string DistributionModel::describe() const {
    std::ostringstream os;
    if (auto* b = as_bernoulli()) {
        os << "bernoulli(p=" << b->p << ")";
    } else if (auto* g = as_gaussian()) {
        os << "gaussian(mean=" << g->mean << ",variance=" << g->variance << ")";
    } else {
        const auto& f = std::get<FiniteDiscrete>(v_);
        os << "finite_discrete(";
        for (std::size_t i = 0; i < f.values.size(); ++i) {
            if (i) os << ",";
            os << f.values[i] << ":" << f.probs[i];
        }
        os << ")";
    }
    return os.str();
}

double log_mgf(const DistributionModel& model, double beta) {
    if (auto* b = model.as_bernoulli()) {
        return bernoulli_log_mgf(b->p, beta);
    }
    if (auto* g = model.as_gaussian()) {
        return g->mean * beta + 0.5 * g->variance * beta * beta;
    }
    const auto* f = model.as_finite_discrete();
    // Max-shifted sum over atoms.
    double m = kNegInf;
    for (std::size_t i = 0; i < f->values.size(); ++i) {
        if (f->probs[i] > 0.0) m = std::max(m, beta * f->values[i]);
    }
    double s = 0.0;
    for (std::size_t i = 0; i < f->values.size(); ++i) {
        if (f->probs[i] > 0.0) s += f->probs[i] * std::exp(beta * f->values[i] - m);
    }
    return m + std::log(s);
}

namespace {

// Golden-section maximization of the concave map beta -> rho*beta - lambda(beta).
double golden_section_conjugate(const DistributionModel& model, double rho) {
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double lo = -50.0, hi = 50.0;
    auto g = [&](double b) { return rho * b - log_mgf(model, b); };
    double x1 = hi - phi * (hi - lo);
    double x2 = lo + phi * (hi - lo);
    double g1 = g(x1), g2 = g(x2);
    while (hi - lo > 1e-10) {
        if (g1 < g2) {
            lo = x1;
            x1 = x2;
            g1 = g2;
            x2 = lo + phi * (hi - lo);
            g2 = g(x2);
        } else {
            hi = x2;
            x2 = x1;
            g2 = g1;
            x1 = hi - phi * (hi - lo);
            g1 = g(x1);
        }
    }
    return g(0.5 * (lo + hi));
}

}  // namespace

ExtReal log_mgf_conjugate(const DistributionModel& model, double rho) {
    if (auto* b = model.as_bernoulli()) {
        if (rho < 0.0 || rho > 1.0) return ExtReal::infinity();
        // Relative entropy of Bernoulli(rho) against Bernoulli(p).
        double v = xlogy(rho, rho / b->p) + xlogy(1.0 - rho, (1.0 - rho) / (1.0 - b->p));
        return ExtReal::finite(v);
    }
    if (auto* g = model.as_gaussian()) {
        double d = rho - g->mean;
        return ExtReal::finite(d * d / (2.0 * g->variance));
    }
    const auto* f = model.as_finite_discrete();
    const double vmin = model.support_min();
    const double vmax = model.support_max();
    if (rho < vmin || rho > vmax) return ExtReal::infinity();
    if (rho == vmin || rho == vmax) {
        double mass = 0.0;
        for (std::size_t i = 0; i < f->values.size(); ++i) {
            if (f->values[i] == rho) mass = f->probs[i];
        }
        if (mass == 0.0) return ExtReal::infinity();
        return ExtReal::finite(-std::log(mass));
    }
    return ExtReal::finite(golden_section_conjugate(model, rho));
}

nlohmann::json model_to_json(const DistributionModel& model) {
    nlohmann::json j;
    if (auto* b = model.as_bernoulli()) {
        j["type"] = "bernoulli";
        j["p"] = b->p;
    } else if (auto* g = model.as_gaussian()) {
        j["type"] = "gaussian";
        j["mean"] = g->mean;
        j["variance"] = g->variance;
    } else {
        const auto* f = model.as_finite_discrete();
        j["type"] = "finite_discrete";
        j["values"] = f->values;
        j["probs"] = f->probs;
    }
    return j;
}

DistributionModel model_from_json(const nlohmann::json& j) {
    const std::string type = j.at("type").get<std::string>();
    if (type == "bernoulli") {
        return DistributionModel::bernoulli(j.at("p").get<double>());
    }
    if (type == "gaussian") {
        return DistributionModel::gaussian(j.at("mean").get<double>(),
                                           j.at("variance").get<double>());
    }
    if (type == "finite_discrete") {
        return DistributionModel::finite_discrete(
            j.at("values").get<std::vector<double>>(),
            j.at("probs").get<std::vector<double>>());
    }
    throw std::invalid_argument("unknown distribution type: " + type);
}

}  // namespace polylab
