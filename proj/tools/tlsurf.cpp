#include "tlsurf/cli.hpp"

int main(int argc, char** argv) { return tlsurf::cli::main_entry(argc, argv); }
