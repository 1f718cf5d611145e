#include <iostream>

#include "shelab_cli/commands.hpp"

int main(int argc, char** argv) { return shelab::cli::run_cli(argc, argv, std::cout, std::cerr); }
