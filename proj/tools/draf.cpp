#include "draf/cli.hpp"

int main(int argc, char** argv) { return draf::cli::run(argc, argv); }
