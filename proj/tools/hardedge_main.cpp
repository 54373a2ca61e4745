#include "hardedge/cli.hpp"

int main(int argc, char** argv) { return hardedge::run_command(argc, argv); }
