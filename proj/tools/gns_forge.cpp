#include <iostream>

#include "gnsforge/cli.hpp"

int main(int argc, char** argv) { return gnsforge::cli::run(argc, argv, std::cout, std::cerr); }
