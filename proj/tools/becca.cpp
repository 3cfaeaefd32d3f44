#include "becca/cli.hpp"

int main(int argc, char** argv) { return becca::run_cli(argc, argv); }
