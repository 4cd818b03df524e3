#include "polylab/count.hpp"

#include <cstdio>

namespace polylab {

std::string histogram_csv(const WeightCountTable& table) {
    std::string out = "h,count,log_mass\n";
    const double log_paths = table.log_total_paths();
    char buf[128];
    if (table.exact) {
        auto hist = table.weight_histogram();
        for (std::int64_t j = 0; j < table.h_size(); ++j) {
            u128 c = hist[static_cast<std::size_t>(j)];
            if (c == 0) continue;
            std::snprintf(buf, sizeof(buf), "%lld,", static_cast<long long>(table.h_min + j));
            out += buf;
            out += u128_to_string(c);
            std::snprintf(buf, sizeof(buf), ",%.17g\n", log_u128(c) - log_paths);
            out += buf;
        }
    } else {
        auto hist = table.log_weight_histogram();
        for (std::int64_t j = 0; j < table.h_size(); ++j) {
            double lc = hist[static_cast<std::size_t>(j)];
            if (lc == kNegInf) continue;
            std::snprintf(buf, sizeof(buf), "%lld,approx,%.17g\n",
                          static_cast<long long>(table.h_min + j), lc - log_paths);
            out += buf;
        }
    }
    return out;
}

}  // namespace polylab
