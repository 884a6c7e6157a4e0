#include "csflow/cli.hpp"

int main(int argc, char** argv) { return csflow::cli::main(argc, argv); }
