#include <iostream>

#include "xorhorn/cli.hpp"

int main(int argc, char** argv) { return xorhorn::cli_main(argc, argv, std::cout, std::cerr); }
