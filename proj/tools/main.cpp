#include <iostream>

#include "cli.hpp"

int main(int argc, char** argv) { return sipmix::cli_dispatch(argc, argv, std::cout, std::cerr); }
