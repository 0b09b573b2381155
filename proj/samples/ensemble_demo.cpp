// Samples a small background ensemble, prints its JSON document and the
// superposed displacement response at a few times.

#include <cstdio>
#include <iostream>

#include "gravlam/background.hpp"
#include "gravlam/oscillator.hpp"
#include "gravlam/serialize.hpp"

int main() {
  const gravlam::SpectrumConfig spectrum{1.0, 10.0, 1e-6, 8};
  const auto ensemble = gravlam::sample_ensemble(spectrum, 42);

  std::cout << gravlam::ensemble_to_json(ensemble).dump(2) << "\n\n";

  const double ell0 = 1.0;
  for (double t : {0.0, 0.5, 1.0, 2.0}) {
    std::printf("superposed response at t = %4.1f s: % .6e m\n", t,
                gravlam::superpose_background(ensemble, ell0, t));
  }

  const auto diag = gravlam::heisenberg_diagnostic(ensemble.modes.front(), 9.1093837015e-31,
                                                   1e-10);
  std::printf("uncertainty diagnostic: dx = %.3e m, dp = %.3e kg m/s, dx*dp/hbar = %.3e\n",
              diag.delta_x, diag.delta_p, diag.product_over_hbar);
  return 0;
}
