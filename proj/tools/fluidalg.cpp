#include "fluidalg/cli/commands.hpp"

#include <iostream>

int main(int argc, char** argv) { return fluidalg::cli::run_cli(argc, argv, std::cout, std::cerr); }
