#include <iostream>

#include "npmix_app/cli.hpp"

int main(int argc, char** argv) {
  return npmix::app::run_cli(argc, argv, std::cout, std::cerr);
}
