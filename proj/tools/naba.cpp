#include "naba/cli_run.hpp"

int main(int argc, char** argv) { return naba::run_cli(argc, argv); }
