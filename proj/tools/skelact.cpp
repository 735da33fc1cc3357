#include <iostream>

#include "skelact/cli.hpp"

int main(int argc, char** argv)
{
    return skelact::run_cli(argc, argv, std::cout, std::cerr);
}
