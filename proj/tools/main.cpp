#include "surveyclust/cli.hpp"

int main(int argc, char** argv) { return surveyclust::run_cli(argc, argv); }
