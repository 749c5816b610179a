#include "phaseless/cli.hpp"

int main(int argc, char** argv) { return phaseless::run_cli(argc, argv); }
