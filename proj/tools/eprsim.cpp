#include "eprsim/cli.hpp"

int main(int argc, char** argv) { return eprsim::cli::run(argc, argv); }
