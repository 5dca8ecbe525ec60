#include <iostream>

#include "mkews/cli.hpp"

int main(int argc, char** argv) { return mkews::cli_dispatch(argc, argv, std::cout, std::cerr); }
