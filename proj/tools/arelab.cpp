#include <iostream>

#include "arelab/cli/commands.hpp"

int main(int argc, char** argv) { return arelab::cli::run(argc, argv, std::cout, std::cerr); }
