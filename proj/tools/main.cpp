#include "cli_app.hpp"

int main(int argc, char** argv) { return momgraph::cli::run(argc, argv); }
