#include "commands.hpp"

int main(int argc, char** argv) { return quasimean::cli::run(argc, argv); }
