#include "ctkit/cli.hpp"

int main(int argc, char** argv) {
    return ctkit::cli::run(argc, argv);
}
