#include "clk/cli.hpp"

int main(int argc, char** argv) { return clk::cli::main(argc, argv); }
