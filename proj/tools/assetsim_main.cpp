#include "assetsim/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return assetsim::run_cli(argc, argv, std::cout, std::cerr); }
