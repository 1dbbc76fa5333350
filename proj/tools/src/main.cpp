#include "gifs_cli/cli.hpp"

int main(int argc, char** argv) { return gifs::cli::run(argc, argv); }
