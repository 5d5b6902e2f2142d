#include "hilbop/cli.hpp"

int main(int argc, char** argv) { return hilbop::cli::run_cli(argc, argv); }
