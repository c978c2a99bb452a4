#include <iostream>

#include "lnstab/cli.hpp"

int main(int argc, char** argv) { return lnstab::cli::run(argc, argv, std::cout, std::cerr); }
