#include "gani/cli.hpp"

int main(int argc, char** argv) { return gani::cli_main(argc, argv); }
