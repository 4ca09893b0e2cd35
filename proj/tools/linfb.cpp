#include "linfb/cli.hpp"

int main(int argc, char** argv) { return linfb::run_cli(argc, argv); }
