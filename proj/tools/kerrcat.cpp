#include "cli.hpp"

int main(int argc, char** argv) { return kerrcat::cli::run(argc, argv); }
