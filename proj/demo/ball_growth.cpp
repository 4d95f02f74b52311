// Prints |B_R| for H^5_Z and H^3_Z, and the local log-log growth exponent.

#include <cmath>
#include <cstdio>

#include "heis/ball.hpp"

int main(int argc, char** argv) {
  const int max_r = argc > 1 ? std::atoi(argv[1]) : 8;
  heis::Ball<heis::DiscretePoint> b5;
  heis::Ball<heis::DiscretePoint3> b3;
  std::printf("%3s %12s %8s %10s %8s\n", "R", "|B_R| H5", "slope", "|B_R| H3", "slope");
  double prev5 = 1, prev3 = 1;
  for (int r = 1; r <= max_r; ++r) {
    b5.grow();
    b3.grow();
    const double s5 = b5.size(), s3 = b3.size();
    const double k = std::log(double(r) / (r - 1 > 0 ? r - 1 : 1));
    std::printf("%3d %12zu %8.3f %10zu %8.3f\n", r, b5.size(), r > 1 ? std::log(s5 / prev5) / k : 0.0,
                b3.size(), r > 1 ? std::log(s3 / prev3) / k : 0.0);
    prev5 = s5;
    prev3 = s3;
  }
}
