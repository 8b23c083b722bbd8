#include "greenwalk/cli.hpp"

int main(int argc, char** argv) { return greenwalk::run_cli(argc, argv); }
