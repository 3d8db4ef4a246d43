#include <iostream>
#include <string>
#include <vector>

#include "shiftgrad/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return shiftgrad::cli::run(args, std::cout, std::cerr);
}
