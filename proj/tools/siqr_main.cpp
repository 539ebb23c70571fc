#include "siqr/cli.hpp"

int main(int argc, char** argv) {
    return siqr::run_cli(argc, argv);
}
