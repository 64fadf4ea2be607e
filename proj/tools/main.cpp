#include "cli.hpp"

int main(int argc, char** argv) { return irisbench::cli::run(argc, argv); }
