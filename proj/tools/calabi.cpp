#include <iostream>

#include "calabi/cli.hpp"

int main(int argc, char** argv) {
  return calabi::cli::run({argv + 1, argv + argc}, std::cout, std::cerr);
}
