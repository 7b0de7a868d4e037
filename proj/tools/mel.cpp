#include <iostream>

#include "mel/cli.hpp"

int main(int argc, char** argv) {
    return mel::run_cli(argc, argv, std::cout, std::cerr);
}
