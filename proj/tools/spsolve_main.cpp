#include "spsolve/cli.hpp"

int main(int argc, char** argv) { return spsolve::cli::cli_main(argc, argv); }
