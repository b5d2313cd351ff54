#include <iostream>

#include "sitealloc/app.hpp"

int main(int argc, char** argv) { return sitealloc::run_cli(argc, argv, std::cout, std::cerr); }
