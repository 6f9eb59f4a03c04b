#include "cqsm/cli.hpp"

int main(int argc, char** argv) { return cqsm::run_cli(argc, argv); }
