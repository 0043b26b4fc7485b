#include <iostream>

#include "rehab/cli.hpp"

int main( int argc, char** argv ) { return rehab::cli::dispatch( argc, argv, std::cout, std::cerr ); }
