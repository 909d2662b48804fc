#include <iostream>

#include "cossu/cli.hpp"

int main(int argc, char** argv) { return cossu::cli::run(argc, argv, std::cout, std::cerr); }
