// LP metric relaxation <= negative-type SDP <= exact sparsest cut on a few
// random instances.

#include <cstdio>
#include <random>

#include "heis/sdp.hpp"

int main(int argc, char** argv) {
  const int count = argc > 1 ? std::atoi(argv[1]) : 5;
  std::mt19937_64 rng(2024);
  std::printf("%2s %12s %12s %12s %8s\n", "n", "lp", "sdp", "opt", "opt/sdp");
  for (int i = 0; i < count; ++i) {
    const int n = 4 + i % 5;
    const auto g = heis::integrality_gap(heis::random_instance(rng, n));
    std::printf("%2d %12.8f %12.8f %12.8f %8.5f\n", g.n, g.lp, g.sdp.objective, g.opt.value, g.gap);
  }
}
