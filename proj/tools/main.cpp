#include <unistd.h>

#include <iostream>
#include <string>
#include <vector>

#include "qpow/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return qpow::cli::run_cli(args, std::cout, std::cerr,
                              isatty(STDOUT_FILENO) == 1);
}
