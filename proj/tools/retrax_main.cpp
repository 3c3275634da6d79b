#include <iostream>

#include "retrax/cli.hpp"

int main(int argc, char** argv) { return retrax::cli::run(argc, argv, std::cin, std::cout, std::cerr); }
