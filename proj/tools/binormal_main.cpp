#include <iostream>

#include "binormal/cli.hpp"

int main(int argc, char** argv) { return binormal::cli::run_cli(argc, argv, std::cout, std::cerr); }
