#include "cafegb/cli.hpp"

int main(int argc, char** argv) { return cafegb::cli::run(argc, argv); }
