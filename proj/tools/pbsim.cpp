#include "pbsim/cli.hpp"

int main(int argc, char** argv) { return pbsim::run_command(argc, argv); }
