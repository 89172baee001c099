// Random balanced stratified trees: tree -> matrix -> GRIP -> tree.
#include <iostream>

#include "pmle/grip.hpp"
#include "pmle/staged_tree.hpp"

int main() {
  using namespace pmle;
  GeneratorConfig cfg;
  int failures = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    auto t = generate_balanced_stratified(seed, cfg);
    auto mat = matrix_from_tree(t);
    bool grip = grip_check(mat).overall;
    auto back = tree_from_matrix(mat);
    bool same = std::holds_alternative<StagedTree>(back) &&
                canonical_form(std::get<StagedTree>(back)) == canonical_form(t);
    if (!grip || !same) ++failures;
    std::cout << "seed " << seed << ": " << mat.m() << " columns, " << t.stages().size() << " stages, grip "
              << grip << ", round trip " << same << '\n';
  }
  return failures ? 1 : 0;
}
