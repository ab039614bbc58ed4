#include "commands.hpp"

int main(int argc, char** argv) { return pppks::cli::run(argc, argv); }
