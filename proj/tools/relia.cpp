#include <iostream>

#include "relia/cli.hpp"

int main(int argc, char** argv) {
    return relia::cli::main(argc, argv, std::cout, std::cerr);
}
