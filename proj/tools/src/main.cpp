#include "commands.hpp"

int main(int argc, char** argv) { return monopole::cli::main_entry(argc, argv); }
