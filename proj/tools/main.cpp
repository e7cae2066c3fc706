#include "rag/cli.hpp"

int main(int argc, char** argv) { return rag::cli::run(argc, argv); }
