#include <iostream>

#include "exportscope/cli.hpp"

int main(int argc, char** argv) { return exportscope::run_cli(argc, argv, std::cout, std::cerr); }
