#include <iostream>

#include "angular/cli.hpp"

int main(int argc, char** argv) { return angular::cli::run(argc, argv, std::cout, std::cerr); }
