#include "perch_cli/commands.hpp"

#include <iostream>

int main(int argc, char **argv)
{
    return perch::cli::run(argc, argv, std::cout, std::cerr);
}
