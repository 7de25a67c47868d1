#include <iostream>

#include "apa/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return apa::run_cli(args, std::cout, std::cerr);
}
