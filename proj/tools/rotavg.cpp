#include "rotavg/cli.hpp"

int main(int argc, char** argv) { return rotavg::cli_main(argc, argv); }
