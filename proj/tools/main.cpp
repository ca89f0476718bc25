#include <iostream>

#include "commands.hpp"

int main(int argc, char** argv) { return wwbkit::cli::run(argc, argv, std::cout, std::cerr); }
