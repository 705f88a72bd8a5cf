// SPDX-License-Identifier: MIT
#include "cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return hjj::cli::run(argc, argv, std::cout, std::cerr); }
