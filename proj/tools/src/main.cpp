#include <iostream>

#include "boresight/cli/commands.hpp"

int main(int argc, char** argv) { return boresight::cli::run(argc, argv, std::cout, std::cerr); }
