#include "qmsim/cli.hpp"

int main(int argc, char** argv) { return qmsim::cli::run(argc, argv); }
