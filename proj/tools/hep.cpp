#include <iostream>

#include "hep/cli.hpp"

int main(int argc, char** argv) { return hep::run_cli(argc, argv, std::cout, std::cerr); }
