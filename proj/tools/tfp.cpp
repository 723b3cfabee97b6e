#include <iostream>

#include "tfp/cli.hpp"

int main(int argc, char** argv) { return tfp::cli::run(argc, argv, std::cout, std::cerr); }
