#include "kgt/cli.hpp"

int main(int argc, char** argv) { return kgt::cli::dispatch(argc, argv); }
