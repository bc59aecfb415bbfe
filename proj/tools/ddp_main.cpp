#include "ddp/cli.hpp"

int main(int argc, char** argv) { return ddp::cli::run(argc, argv); }
