#include "cli.hpp"
#include <iostream>

int main(int argc, char** argv) { return lluv::tools::main_entry(argc, argv, std::cout, std::cerr); }
