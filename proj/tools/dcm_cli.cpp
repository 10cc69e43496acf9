#include "dcm/cli.hpp"

int main(int argc, char** argv) { return dcm::run_cli(argc, argv); }
