#include <iostream>

#include "ctcnn/cli.hpp"

int main(int argc, char** argv) { return ctcnn::run_cli(argc, argv, std::cout, std::cerr); }
