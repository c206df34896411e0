#include "gn/cli.hpp"

int main(int argc, char** argv) { return gn::cli_main(argc, argv); }
