#include "isrs_egn/cli.hpp"

int main(int argc, char** argv) { return isrs_egn::cli::run(argc, argv); }
