#include "radon/cli.hpp"

int main(int argc, char** argv) { return radon::cli::main(argc, argv); }
