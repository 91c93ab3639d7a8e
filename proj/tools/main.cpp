#include "cli.hpp"

int main(int argc, char** argv) { return tsroa::cli::main_with_args(argc, argv); }
