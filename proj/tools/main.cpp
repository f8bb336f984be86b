#include "tscale/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
  return tscale::parse_and_dispatch(argc, argv, std::cout, std::cerr);
}
