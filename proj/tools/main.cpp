#include <iostream>

#include "intop/cli.hpp"

int main(int argc, char** argv) { return intop::cli::run(argc, argv, std::cout, std::cerr); }
