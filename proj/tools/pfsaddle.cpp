#include "pfsaddle/harness.hpp"

int main(int argc, char** argv) { return pfsaddle::run_cli(argc, argv); }
