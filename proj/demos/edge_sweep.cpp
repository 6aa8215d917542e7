// Edge profile of b_n = -n^{-1/2}: turning index, exponent, envelope and the
// Carmona estimate at a few distances from x = 2.

#include <cstdio>

#include "edgeweight/edgeweight.hpp"

int main() {
    using namespace edgeweight;
    const auto model = ParameterModel::power_law_b(1.0, 0.5);
    std::printf("%8s %8s %12s %10s %12s %12s %5s\n", "delta", "N", "g", "h", "-log(w)/2", "Q series", "ok");
    for (double delta : {0.2, 0.1, 0.05, 0.02}) {
        const auto row = edge_profile(model, 2.0 - delta);
        std::printf("%8.3f %8.0f %12.4f %10.4f %12.4f %12.4f %5s\n", delta, row.N, row.g, row.h,
                    -0.5 * row.log_w_carmona, row.q_series, row.pass == 1 ? "yes" : "no");
    }
}
