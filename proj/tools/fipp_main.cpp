#include <iostream>

#include "fipp/commands.hpp"

int main(int argc, char** argv) { return fipp::cli::run(argc, argv, std::cout, std::cerr); }
