// SPDX-License-Identifier: Apache-2.0
#include <skillrt/cli.hpp>

#include <iostream>

int main(int argc, char** argv)
{
    auto args = std::vector<std::string>(argv + 1, argv + argc);
    return skillrt::runCli(args, std::cout, std::cerr);
}
