// Exact Taylor coefficients of arccosh(1 + z/2)/sqrt(z) and the growing terms
// of the edge expansion of Q for b_n = -n^{-0.4}.

#include <cstdio>

#include "edgeweight/edgeweight.hpp"

int main() {
    using namespace edgeweight;
    const auto c = arccosh_coeffs(6);
    for (std::size_t l = 0; l < c.size(); ++l) std::printf("c_%zu = %s\n", l, c.as_string(l).c_str());

    const auto cmp = compare_c20();
    std::printf("c_20 exact   %s\nc_20 quoted  %s (%s)\n", cmp.computed.c_str(), cmp.quoted.c_str(),
                cmp.match ? "match" : "differs");

    const auto q = q_series(0.4, 1.0, 1e-3);
    std::printf("\nQ(2 - 1e-3) for beta = 0.4: %.6f\n", q.total);
    for (const auto& t : q.terms)
        std::printf("  l=%d  %.6e * delta^%.2f = %.6f\n", t.l, t.coefficient, t.exponent, t.value);
}
