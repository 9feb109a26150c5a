#include <iostream>

#include "tripforge/cli.hpp"

int main(int argc, char** argv) { return tripforge::run_cli(argc, argv, std::cout, std::cerr); }
