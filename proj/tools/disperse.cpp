#include "disperse/cli.hpp"

int main(int argc, char** argv) { return disperse::cli_main(argc, argv); }
