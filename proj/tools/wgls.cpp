#include "wgls/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return wgls::cli_main(argc, argv, std::cout, std::cerr); }
