#include "mahi/cli.hpp"

int main(int argc, char** argv) { return mahi::cli_main(argc, argv); }
