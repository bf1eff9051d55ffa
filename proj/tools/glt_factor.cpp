#include "glt/cli.hpp"

int main(int argc, char** argv) { return glt::run_cli(argc, argv); }
