#include <iostream>

#include "nndc_tools/cli.hpp"

int main(int argc, char** argv) { return nndc::tools::run_cli(argc, argv, std::cout, std::cerr); }
