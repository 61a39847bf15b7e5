#include <iostream>

#include "pii/cli.hpp"

int main(int argc, char** argv) { return pii::cli::run(argc, argv, std::cout, std::cerr); }
