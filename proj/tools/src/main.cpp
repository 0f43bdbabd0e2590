#include "engram_cli/commands.hpp"

int main(int argc, char** argv) { return engram::cli::run(argc, argv); }
