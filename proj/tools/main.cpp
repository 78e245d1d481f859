#include "tangleflow/cli.hpp"

int main(int argc, char** argv) { return tangleflow::cli_main(argc, argv); }
