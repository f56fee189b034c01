#include "commands.hpp"

int main(int argc, char** argv) { return driftlab::cli::dispatch(argc, argv); }
