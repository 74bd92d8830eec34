#include "seqmeas/cli.hpp"

int main(int argc, char** argv) { return seqmeas::cli::run(argc, argv); }
