#include <iostream>

#include "netcc/cli.hpp"

int main(int argc, char** argv) { return netcc::run_cli(argc, argv, std::cout, std::cerr); }
