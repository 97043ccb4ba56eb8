#include "sketch_infer/cli.hpp"

int main(int argc, char** argv) { return sketch_infer::run_cli(argc, argv); }
