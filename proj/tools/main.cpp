#include "ptdqd/cli.hpp"

int main(int argc, char** argv) { return ptdqd::cli_main(argc, argv); }
