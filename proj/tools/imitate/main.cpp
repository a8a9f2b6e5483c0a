#include <iostream>

#include "imitate/cli/run.hpp"

int main(int argc, char** argv) { return imitate::cli::run_main(argc, argv, std::cout, std::cerr); }
