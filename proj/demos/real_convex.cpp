// Builds h = 1 + K r + r_y for a few real defining functions y + G.
#include <cstdio>

#include "pshdf/expr.hpp"
#include "pshdf/real_convex.hpp"

using namespace pshdf;

int main() {
  for (const char* src : {"y + x^2", "y + x^4", "y + x^2 + x*y^2 - 3*y^2", "y + x1^2 + x2^4"}) {
    RealDefiningFunction df(parse_rpoly(src));
    auto res = convex_multiplier(df);
    std::printf("%-24s %-9s K = %-4s h = %s  least eigenvalue %+.3e\n", src, res.found ? "certified" : "exhausted",
                res.K.get_str().c_str(), to_string(res.h).c_str(), res.psd.minima.least_eigenvalue);
  }
}
