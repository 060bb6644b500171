#include <iostream>

#include "hjplan/cli.hpp"

int main(int argc, char** argv)
{
  return hjplan::run_cli(argc, argv, std::cout, std::cerr);
}
