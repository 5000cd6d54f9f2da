// Prints the stage-by-stage construction for a defining function given on the
// command line, defaulting to r_8.
#include <cstdio>
#include <string>

#include "pshdf/expr.hpp"
#include "pshdf/multiplier.hpp"

using namespace pshdf;

int main(int argc, char** argv) {
  const std::string src = argc > 1 ? argv[1] : "Im(w) + abs2(z)^2 + 100*abs2(z)^3 + 4*Re(z)*Re(w) - 8*Re(w)^2";
  auto df = make_defining_function(parse_wpoly(src));
  auto rep = run_construction(df);
  std::printf("r = %s\n", df.r().to_real_string().c_str());
  for (const auto& st : rep.stages) {
    std::printf("stage %d  candidate T = %s  K search: %s\n", st.index, st.candidate_T.to_real_string().c_str(),
                st.k.found ? ("K = " + st.k.K.get_str()).c_str() : "failed");
    for (const auto& a : st.absorbed) std::printf("  absorbed %s\n", a.to_real_string().c_str());
    for (std::size_t j = 0; j < st.split.size(); ++j)
      std::printf("  S = %s\n  E = %s\n", st.split[j].S.to_string().c_str(), st.split[j].E.to_string().c_str());
    if (st.solved) std::printf("  T increment %s\n", st.merged_T_inc.to_real_string().c_str());
  }
  std::printf("%s: %s\n", to_string(rep.status).c_str(), rep.message.c_str());
  if (rep.final.K)
    std::printf("K = %s, T = %s\n", rep.final.K->get_str().c_str(), rep.final.T.to_real_string().c_str());
  return rep.status == ConstructionStatus::Certified ? 0 : 1;
}
