#include <iostream>

#include "cptmdp/cli.hpp"

int main(int argc, char** argv) { return cptmdp::run(argc, argv, std::cout, std::cerr); }
