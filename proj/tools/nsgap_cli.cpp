#include <iostream>

#include "nsgap/experiment.hpp"

int main(int argc, char** argv) { return nsgap::nsgap_main(argc, argv, std::cout, std::cerr); }
