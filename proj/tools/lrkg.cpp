#include <iostream>

#include "lrkg/cli.hpp"

int main(int argc, char** argv) { return lrkg::cli::run(argc, argv, std::cout, std::cerr); }
