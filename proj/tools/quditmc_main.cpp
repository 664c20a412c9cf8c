// Binary entry point; all logic lives in the library's CLI layer.
#include "quditmc/cli.hpp"

int main(int argc, char** argv) { return quditmc::run_cli(argc, argv); }
