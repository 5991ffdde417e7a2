#include "kvlab/cli.hpp"

int main(int argc, char** argv) { return kvlab::run_command(argc, argv); }
