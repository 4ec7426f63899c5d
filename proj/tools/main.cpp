#include <iostream>

#include "cowalk/cli.hpp"

int main(int argc, char** argv) { return cowalk::cli::run(argc, argv, std::cout, std::cerr); }
