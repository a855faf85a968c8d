#include <iostream>

#include "blpp/cli.hpp"

int main(int argc, char** argv) {
    return blpp::cli_main(argc, argv, std::cout, std::cerr);
}
