#pragma once

#include <cmath>
#include <concepts>
#include <cstdint>
#include <span>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json_fwd.hpp>

#include "polylab/distribution.hpp"
#include "polylab/lattice.hpp"
#include "polylab/rng.hpp"

namespace polylab {

// Anything the transfer and counting recursions can run over: a window of
// site weights for times 1..horizon() and sites |x|_1 <= k.
template <class V>
concept EnvironmentLike = requires(const V& v, int k, std::span<const std::int32_t> x) {
    { v.dimension() } -> std::convertible_to<int>;
    { v.horizon() } -> std::convertible_to<int>;
    { v.weight(k, x) } -> std::convertible_to<double>;
};

// IID site weights on {1..n_max} x {|x|_1 <= k}, derived on demand from a
// counter-based generator: each weight is a pure function of
// (seed, k, x-coordinates) via chained SplitMix64 (rng::site_key), with the
// resulting uniform mapped through the model's quantile. Regeneration from
// the same seed is bit-identical, and any sub-window can be produced
// without the rest of the field. Immutable; safe to share across threads.
class LatticeEnvironment {
  public:
    LatticeEnvironment(DistributionModel model, int d, int n_max, std::uint64_t seed)
        : model_(std::move(model)), d_(d), n_max_(n_max), seed_(seed) {
        if (d < 1) throw std::invalid_argument("LatticeEnvironment: d must be >= 1");
        if (n_max < 1) throw std::invalid_argument("LatticeEnvironment: n_max must be >= 1");
    }

    int dimension() const { return d_; }
    int horizon() const { return n_max_; }
    std::uint64_t seed() const { return seed_; }
    const DistributionModel& model() const { return model_; }

    double weight(int k, std::span<const std::int32_t> x) const {
        check_window(k, x);
        double u = rng::uniform01(rng::site_key(seed_, k, x));
        return model_.quantile(u);
    }

  private:
    void check_window(int k, std::span<const std::int32_t> x) const {
        if (static_cast<int>(x.size()) != d_) {
            throw std::out_of_range("environment: site dimension mismatch");
        }
        if (k < 1 || k > n_max_ || l1_norm(x) > k) {
            std::ostringstream os;
            os << "environment: site (k=" << k << ", x=(";
            for (std::size_t i = 0; i < x.size(); ++i) os << (i ? "," : "") << x[i];
            os << ")) outside the generated window";
            throw std::out_of_range(os.str());
        }
    }

    DistributionModel model_;
    int d_;
    int n_max_;
    std::uint64_t seed_;
};

inline LatticeEnvironment sample_environment(const DistributionModel& model, int d,
                                             int n_max, std::uint64_t seed) {
    return LatticeEnvironment(model, d, n_max, seed);
}

// Read-only environment shifted by (dt, dx): weight(i, y) of the view is
// weight(dt + i, dx + y) of the base. Requires |dx|_1 <= dt so the view's
// reachable cone stays inside the base window.
template <EnvironmentLike Base>
class TranslatedView {
  public:
    TranslatedView(const Base& base, int dt, Site dx) : base_(&base), dt_(dt), dx_(std::move(dx)) {
        if (static_cast<int>(dx_.size()) != base.dimension()) {
            throw std::invalid_argument("translate: offset dimension mismatch");
        }
        if (dt < 0 || l1_norm(dx_) > dt) {
            throw std::invalid_argument("translate: offset (dt, dx) must satisfy |dx|_1 <= dt");
        }
        if (dt > base.horizon()) {
            throw std::invalid_argument("translate: time offset exceeds the base window");
        }
    }

    int dimension() const { return base_->dimension(); }
    int horizon() const { return base_->horizon() - dt_; }

    double weight(int i, std::span<const std::int32_t> y) const {
        Site shifted(dx_.size());
        for (std::size_t c = 0; c < dx_.size(); ++c) {
            shifted[c] = dx_[c] + y[c];
        }
        return base_->weight(dt_ + i, shifted);
    }

    int time_offset() const { return dt_; }
    const Site& space_offset() const { return dx_; }

  private:
    const Base* base_;
    int dt_;
    Site dx_;
};

template <EnvironmentLike Base>
TranslatedView<Base> translate(const Base& env, int dt, Site dx) {
    return TranslatedView<Base>(env, dt, std::move(dx));
}

// Integer lattice approximation of a real-weight environment: weights are
// round(eta / step), exposed as exact integers in double form. The coupling
// error after n steps is |H_quantized * step - H| <= n * step / 2.
template <EnvironmentLike Base>
class QuantizedView {
  public:
    QuantizedView(const Base& base, double step) : base_(&base), step_(step) {
        if (!(step > 0.0)) throw std::invalid_argument("quantize: step must be positive");
    }

    int dimension() const { return base_->dimension(); }
    int horizon() const { return base_->horizon(); }
    double step() const { return step_; }

    double weight(int k, std::span<const std::int32_t> x) const {
        return std::nearbyint(base_->weight(k, x) / step_);
    }

    // Uniform per-path bound on |H_quantized*step - H| over n steps.
    double coupling_bound(int n) const { return 0.5 * step_ * n; }

  private:
    const Base* base_;
    double step_;
};

template <EnvironmentLike Base>
QuantizedView<Base> quantize_environment(const Base& env, double step) {
    return QuantizedView<Base>(env, step);
}

// Sign-flipped weights; turns maximal path weight into minimal and p(beta)
// into p(-beta).
template <EnvironmentLike Base>
class NegatedView {
  public:
    explicit NegatedView(const Base& base) : base_(&base) {}
    int dimension() const { return base_->dimension(); }
    int horizon() const { return base_->horizon(); }
    double weight(int k, std::span<const std::int32_t> x) const { return -base_->weight(k, x); }

  private:
    const Base* base_;
};

// Environment descriptor: the full field is reproducible from these four
// fields, so raw weights are never serialized.
struct EnvironmentDescriptor {
    DistributionModel model;
    int d = 1;
    int n_max = 1;
    std::uint64_t seed = 0;

    LatticeEnvironment realize() const { return LatticeEnvironment(model, d, n_max, seed); }
};

nlohmann::json descriptor_to_json(const EnvironmentDescriptor& desc);
EnvironmentDescriptor descriptor_from_json(const nlohmann::json& j);

}  // namespace polylab
