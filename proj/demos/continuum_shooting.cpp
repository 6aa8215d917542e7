// Half-line Schrodinger operator with V = (x + 1)^{-1}: g(E), h(E) and the
// Carmona estimate from shooting, plus the monotonicity checks at E = 0.1.

#include <cstdio>

#include "edgeweight/edgeweight.hpp"

int main() {
    using namespace edgeweight;
    const auto V = PotentialModel::shifted_power_law(1.0, 1.0, 1.0);
    for (double E : {0.2, 0.1, 0.05}) {
        const auto row = continuum_edge_row(V, E);
        std::printf("E=%.2f  N=%.3f  g=%.5f  h=%.4f  Q_est=%.5f  %s\n", E, row.N, row.g, row.h,
                    -0.5 * row.log_w_carmona, row.pass == 1 ? "inside" : "outside");
    }
    const double E = 0.1;
    const auto tr = shoot(V, E, 30.0);
    const auto rep = monotone_checks(V, E, tr);
    for (const auto& c : rep.checks)
        std::printf("%-14s  instances=%lld  max violation=%.2e\n", c.name.c_str(),
                    static_cast<long long>(c.instances), c.max_violation);
}
