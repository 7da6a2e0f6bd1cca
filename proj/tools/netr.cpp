#include "netr/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return netr::runCli(argc, argv, std::cout, std::cerr); }
