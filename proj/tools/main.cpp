#include <iostream>

#include "cmm/app.hpp"

int main(int argc, char** argv) { return cmm::run_cli(argc, argv, std::cout, std::cerr); }
