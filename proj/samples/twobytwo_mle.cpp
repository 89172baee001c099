// Exact IPS on the 2x2 independence model against its closed-form MLE.
#include <iostream>

#include "pmle/ips.hpp"
#include "pmle/matrix_io.hpp"
#include "pmle/mle.hpp"

int main() {
  using namespace pmle;
  auto mat = parse_matrix("1 1 0 0\n0 0 1 1\n---\n1 0 1 0\n0 1 0 1\n");
  FractionVector d{Fraction(1, 10), Fraction(2, 10), Fraction(3, 10), Fraction(4, 10)};

  IpsConfig cfg;
  auto run = ips_run<Fraction>(mat, d, cfg);
  auto mle = closed_form_mle(mat, d);

  std::cout << "steps " << run.steps_taken << ", one cycle exact: " << std::boolalpha << run.one_cycle_exact << '\n';
  for (std::size_t j = 0; j < mat.m(); ++j)
    std::cout << "p" << j + 1 << " = " << run.final[j].to_string() << "  closed form " << mle.p_star[j].to_string()
              << '\n';
}
