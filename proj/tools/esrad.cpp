#include "esrad/cli.hpp"

int main(int argc, char** argv) { return esrad::cli::run(argc, argv); }
