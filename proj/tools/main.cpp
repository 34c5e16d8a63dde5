#include <iostream>

#include "rankcg/cli.hpp"

int main(int argc, char** argv) { return rankcg::cli::run(argc, argv, std::cout, std::cerr); }
