#include "fairloop/cli.hpp"

int main(int argc, char** argv) { return fairloop::run_cli(argc, argv); }
