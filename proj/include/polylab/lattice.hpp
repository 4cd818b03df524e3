#pragma once

#include <cstdint>
#include <cstdlib>
#include <span>
#include <stdexcept>
#include <vector>

namespace polylab {

using Site = std::vector<std::int32_t>;

inline int l1_norm(std::span<const std::int32_t> x) {
    int s = 0;
    for (auto c : x) s += std::abs(c);
    return s;
}

// Dense cube [-radius, radius]^d, row-major with stride side^i on axis i.
// Holds transfer slices and count tables; sites outside the walk's
// parity/range cone simply stay at their fill value.
struct LatticeBox {
    int d = 1;
    int radius = 0;
    std::int64_t side = 1;
    std::int64_t size = 1;
    std::vector<std::int64_t> strides;

    LatticeBox() = default;
    LatticeBox(int dim, int r) : d(dim), radius(r), side(2 * static_cast<std::int64_t>(r) + 1) {
        strides.resize(static_cast<std::size_t>(d));
        std::int64_t s = 1;
        for (int i = 0; i < d; ++i) {
            strides[static_cast<std::size_t>(i)] = s;
            s *= side;
        }
        size = s;
    }

    std::int64_t index_of(std::span<const std::int32_t> x) const {
        std::int64_t idx = 0;
        for (int i = 0; i < d; ++i) {
            std::int32_t c = x[static_cast<std::size_t>(i)];
            if (c < -radius || c > radius) throw std::out_of_range("LatticeBox: site outside box");
            idx += (c + radius) * strides[static_cast<std::size_t>(i)];
        }
        return idx;
    }

    // Visits every site x with |x|_1 <= k and |x|_1 == k (mod 2): the set a
    // nearest-neighbour walk from the origin can occupy after k steps.
    // f(coords, flat_index) with coords valid only during the call.
    template <class F>
    void for_each_reachable(int k, F&& f) const {
        if (k > radius) throw std::out_of_range("LatticeBox: k exceeds box radius");
        Site x(static_cast<std::size_t>(d), static_cast<std::int32_t>(-k));
        for (;;) {
            int l1 = l1_norm(x);
            if (l1 <= k && ((l1 ^ k) & 1) == 0) {
                f(std::span<const std::int32_t>(x), index_of(x));
            }
            int axis = 0;
            while (axis < d) {
                if (x[static_cast<std::size_t>(axis)] < k) {
                    ++x[static_cast<std::size_t>(axis)];
                    break;
                }
                x[static_cast<std::size_t>(axis)] = static_cast<std::int32_t>(-k);
                ++axis;
            }
            if (axis == d) break;
        }
    }
};

}  // namespace polylab
