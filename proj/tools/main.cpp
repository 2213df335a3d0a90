#include <iostream>

#include "phasebal/cli.hpp"

int main(int argc, char** argv) { return phasebal::cli::main(argc, argv, std::cout, std::cerr); }
