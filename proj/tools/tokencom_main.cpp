#include "tokencom/harness/cli.hpp"

int main(int argc, char** argv) { return tokencom::harness::run_cli(argc, argv); }
