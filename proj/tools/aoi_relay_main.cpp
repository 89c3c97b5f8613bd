#include <iostream>

#include "aoi_relay/cli.hpp"

int main(int argc, char** argv) {
    return aoi_relay::run_cli(argc, argv, std::cout, std::cerr);
}
