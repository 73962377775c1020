#include <iostream>

#include "flexbench/cli.hpp"

int main(int argc, char** argv)
{
    return flexbench::run_cli(argc, argv, std::cout, std::cerr);
}
