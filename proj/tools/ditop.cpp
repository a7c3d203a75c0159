#include <iostream>

#include "ditop/cli.hpp"

int main(int argc, char** argv) { return ditop::cli::run(argc, argv, std::cout, std::cerr); }
