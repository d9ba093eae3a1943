#include "loglin/cli.hpp"

int main(int argc, char** argv) { return loglin::cli_dispatch(argc, argv); }
