// Hopf cylinders over base circles in each 3-dimensional model: |H| = kappa/2
// and the two quadratic forms stay away from zero.

#include <iomanip>
#include <iostream>

#include "sasaki/suites.hpp"

using namespace sasaki;

int main() {
  std::cout << std::left << std::setw(18) << "model" << std::setw(7) << "c" << std::setw(7) << "kappa"
            << std::setw(12) << "|H|" << std::setw(12) << "min|Q1|" << std::setw(12) << "min|Q2|" << "pmc residual\n";
  for (const auto& m : {make_sphere(1), make_sphere(1, 2.0), make_heisenberg(1), make_ball(1, -4.0)})
    for (double k : {0.5, 2.0}) {
      HopfSuiteConfig cfg;
      cfg.kappa = k;
      cfg.grid = 5;
      const auto R = verify_hopf_cylinder(m, cfg);
      std::cout << std::setw(18) << m.name() << std::setw(7) << m.c << std::setw(7) << k << std::setw(12)
                << R.measurements["H_norm_max"].get<double>() << std::setw(12)
                << R.measurements["min_abs_Q1"].get<double>() << std::setw(12)
                << R.measurements["min_abs_Q2"].get<double>() << R.measurements["pmc_residual"].get<double>() << '\n';
    }
  HopfSuiteConfig wobbly;
  wobbly.amplitude = 0.5;
  const auto W = verify_hopf_cylinder(make_heisenberg(1), wobbly);
  std::cout << "varying base curvature: pmc residual " << W.measurements["pmc_residual"].get<double>() << '\n';
  return 0;
}
