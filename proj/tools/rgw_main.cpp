#include "rgw/cli.hpp"

int main(int argc, char** argv) { return rgw::cli::run(argc, argv); }
