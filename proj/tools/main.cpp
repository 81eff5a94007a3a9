#include "cli.hpp"

int main(int argc, char** argv) { return cascade_clock::cli::run(argc, argv); }
