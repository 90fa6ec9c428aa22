#include "gapquest/cli.hpp"

#include <iostream>

int main(int argc, char **argv)
{
    return gapquest::run_cli(argc, argv, std::cout, std::cerr);
}
