#include "rscf/cli.hpp"

int main(int argc, char** argv) { return rscf::cli_main(argc, argv); }
