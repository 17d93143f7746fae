#include "sheathlab/cli.hpp"

int main(int argc, char** argv) { return sheathlab::cli_main(argc, argv); }
