#include <iostream>

#include "ptomit/cli.hpp"

int main(int argc, char** argv)
{
    return ptomit::cli::run(argc, argv, std::cout, std::cerr);
}
