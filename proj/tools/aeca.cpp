#include <iostream>

#include "aeca/cli.hpp"

int main(int argc, char** argv) { return aeca::cli::run(argc, argv, std::cout, std::cerr); }
