#include "qiwave/cli.hpp"

int main(int argc, char** argv) { return qiwave::cli::main_entry(argc, argv); }
