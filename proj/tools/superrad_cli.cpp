#include "superrad/cli.hpp"

int main(int argc, char** argv) { return superrad::cli::dispatch(argc, argv); }
