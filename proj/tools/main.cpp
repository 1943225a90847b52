#include "tslto_cli/app.hpp"

#include <iostream>

int main(int argc, char** argv) {
  return tslto::cli::run_cli(argc, argv, std::cout, std::cerr);
}
