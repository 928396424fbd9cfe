#include <iostream>

#include "uio/cli.hpp"

int main(int argc, char** argv) { return uio::cli::run(argc, argv, std::cout, std::cerr); }
