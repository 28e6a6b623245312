#include <iostream>
#include <string>
#include <vector>

#include "pvm/app.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    return pvm::cli::run(args, std::cout, std::cerr);
}
