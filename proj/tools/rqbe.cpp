#include <iostream>

#include "rqbe/cli.hpp"

int main(int argc, char** argv) { return rqbe::cli::run(argc, argv, std::cout, std::cerr); }
