#include "spinsens/cli.hpp"

int main(int argc, char** argv) { return spinsens::cli::main(argc, argv); }
