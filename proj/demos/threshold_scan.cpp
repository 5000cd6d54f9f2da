// Sweeps A in r_A = Im w + |z|^4 + 100|z|^6 + 4 Re z Re w - A (Re w)^2 and
// reports the least sampled Levi value and the construction outcome.
#include <cstdio>
#include <string>

#include "pshdf/expr.hpp"
#include "pshdf/multiplier.hpp"

using namespace pshdf;

int main() {
  for (int a = 6; a <= 11; ++a) {
    const std::string src =
        "Im(w) + abs2(z)^2 + 100*abs2(z)^3 + 4*Re(z)*Re(w) - " + std::to_string(a) + "*Re(w)^2";
    auto df = make_defining_function(parse_wpoly(src));
    auto scan = levi_scan(df, sample_boundary(df, 1e-2, 10000, 1));
    std::string outcome;
    try {
      auto rep = run_construction(df);
      outcome = to_string(rep.status);
      if (rep.final.K) outcome += " at stage " + std::to_string(rep.final.stage) + " with T = " +
                                  rep.final.T.to_real_string() + ", K = " + rep.final.K->get_str();
    } catch (const NotPseudoconvexError&) {
      outcome = "not pseudoconvex";
    }
    std::printf("A = %2d  min Levi %+.3e  negatives %5zu  %s\n", a, scan.min_value, scan.negatives, outcome.c_str());
  }
}
