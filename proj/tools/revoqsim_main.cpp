#include "revoq/cli.hpp"

int main(int argc, char** argv) { return revoq::run_cli(argc, argv); }
