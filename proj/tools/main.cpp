#include "commands.hpp"

int main(int argc, char** argv) { return nctf::cli::run(argc, argv); }
