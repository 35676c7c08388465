#include <iostream>

#include "haven/cli.hpp"

int main(int argc, char** argv) { return haven::run_cli(argc, argv, std::cout, std::cerr); }
