#include "turnpike/app.hpp"

int main(int argc, char** argv) { return turnpike::cli_main(argc, argv); }
