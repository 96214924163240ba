#include <iostream>

#include "tccp/cli.hpp"

int main(int argc, char** argv) { return tccp::cli::main(argc, argv, std::cout, std::cerr); }
