#include "tvpgamp/cli.hpp"

int main(int argc, char** argv) { return tvpgamp::run_cli(argc, argv); }
