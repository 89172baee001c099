// Print the GRIP report of a matrix file (default: the 14-column example).
#include <iostream>

#include "pmle/json_io.hpp"
#include "pmle/matrix_io.hpp"

int main(int argc, char** argv) {
  using namespace pmle;
  std::string path = argc > 1 ? argv[1] : "data/fourteen.txt";
  try {
    auto mat = load_matrix(path);
    std::cout << to_json(grip_check(mat)).dump(2) << '\n';
  } catch (const std::exception& e) {
    std::cerr << e.what() << '\n';
    return 1;
  }
}
