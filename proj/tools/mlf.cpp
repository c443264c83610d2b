#include <iostream>

#include "mlf/cli.hpp"

int main(int argc, char** argv)
{
    return mlf::cli::run(argc, argv, std::cout, std::cerr);
}
