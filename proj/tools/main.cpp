#include "aztec/cli.hpp"

int main(int argc, char** argv) { return aztec::dispatch(argc, argv); }
