#include "spread_edge/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return spread_edge::run_cli(args, std::cout, std::cerr);
}
