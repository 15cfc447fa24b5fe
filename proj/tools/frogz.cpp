#include <iostream>

#include "frogz/cli.hpp"

int main(int argc, char** argv) { return frogz::cli::run(argc, argv, std::cout, std::cerr); }
