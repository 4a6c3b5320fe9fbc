#include "bqsos/cli_app.hpp"

int main(int argc, char** argv) { return bqsos::run_cli(argc, argv); }
