#include <iostream>

#include "uds/cli.hpp"

int main(int argc, char** argv) { return uds::cli::run(argc, argv, std::cout, std::cerr); }
