#include "cli.hpp"

int main(int argc, char** argv) { return laxmono::cli::run({argv + 1, argv + argc}); }
