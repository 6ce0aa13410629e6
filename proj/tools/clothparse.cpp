#include <iostream>

#include "clothparse/cli/cli.hpp"

int main(int argc, char** argv) { return clothparse::cli::run(argc, argv, std::cout, std::cerr); }
