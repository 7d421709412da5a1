#include "rset/cli.hpp"

int main(int argc, char** argv) { return rset::run(argc, argv); }
