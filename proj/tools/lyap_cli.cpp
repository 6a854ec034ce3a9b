#include "lyap/cli.hpp"

int main(int argc, char** argv) { return lyap::main_impl(argc, argv); }
