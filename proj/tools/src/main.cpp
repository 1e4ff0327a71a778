#include <iostream>

#include "torusflow/cli.hpp"

int main(int argc, char** argv) { return torusflow::cli::main(argc, argv, std::cout, std::cerr); }
