#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace polylab {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// log(e^a + e^b), safe for -inf arguments.
inline double log_add_exp(double a, double b) {
    if (a == kNegInf) return b;
    if (b == kNegInf) return a;
    double m = std::max(a, b);
    return m + std::log(std::exp(a - m) + std::exp(b - m));
}

// log sum_i e^{v_i} with max-shift; empty input or all -inf gives -inf.
inline double log_sum_exp(std::span<const double> values) {
    double m = kNegInf;
    for (double v : values) m = std::max(m, v);
    if (m == kNegInf) return kNegInf;
    double s = 0.0;
    for (double v : values) s += std::exp(v - m);
    return m + std::log(s);
}

// Online log-sum-exp accumulator; rescales when a new maximum arrives.
class StreamingLogSumExp {
  public:
    void add(double v) {
        if (v == kNegInf) return;
        if (v <= max_) {
            sum_ += std::exp(v - max_);
        } else {
            sum_ = (max_ == kNegInf) ? 1.0 : sum_ * std::exp(max_ - v) + 1.0;
            max_ = v;
        }
    }
    double value() const {
        if (max_ == kNegInf) return kNegInf;
        return max_ + std::log(sum_);
    }

  private:
    double max_ = kNegInf;
    double sum_ = 0.0;
};

// Sample mean and standard error of the mean. Accumulation order is the
// index order of the input, so results do not depend on how the samples
// were produced.
struct MeanSe {
    double mean = 0.0;
    double se = 0.0;
    std::size_t count = 0;
};

inline MeanSe mean_se(std::span<const double> samples) {
    MeanSe out;
    out.count = samples.size();
    if (samples.empty()) return out;
    double s = 0.0;
    for (double v : samples) s += v;
    out.mean = s / static_cast<double>(samples.size());
    if (samples.size() < 2) return out;
    double ss = 0.0;
    for (double v : samples) {
        double d = v - out.mean;
        ss += d * d;
    }
    std::size_t m = samples.size();
    out.se = std::sqrt(ss / (static_cast<double>(m) * static_cast<double>(m - 1)));
    return out;
}

// Extended real in [ -inf handled elsewhere ); +infinity is a tag, never a
// floating overflow. Used for conjugates and rate functions.
class ExtReal {
  public:
    static ExtReal finite(double v) { return ExtReal(v, true); }
    static ExtReal infinity() { return ExtReal(0.0, false); }

    bool is_finite() const { return finite_; }
    double value() const {
        if (!finite_) throw std::logic_error("ExtReal: value() on +infinity");
        return value_;
    }
    // Numeric view, mapping the tag to the IEEE infinity. Comparison only.
    double as_double() const {
        return finite_ ? value_ : std::numeric_limits<double>::infinity();
    }

  private:
    ExtReal(double v, bool f) : value_(v), finite_(f) {}
    double value_;
    bool finite_;
};

using u128 = unsigned __int128;

inline std::string u128_to_string(u128 v) {
    if (v == 0) return "0";
    std::string s;
    while (v > 0) {
        s.push_back(static_cast<char>('0' + static_cast<int>(v % 10)));
        v /= 10;
    }
    return std::string(s.rbegin(), s.rend());
}

// Natural log of a positive 128-bit count.
inline double log_u128(u128 v) {
    if (v == 0) return kNegInf;
    return std::log(static_cast<double>(v));
}

}  // namespace polylab
