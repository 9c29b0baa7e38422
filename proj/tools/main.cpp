#include <iostream>

#include "tnpath/cli.hpp"

int main(int argc, char** argv) { return tnpath::cli_main(argc, argv, std::cout, std::cerr); }
