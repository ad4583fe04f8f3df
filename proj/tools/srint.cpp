#include "srint/cli.hpp"

int main(int argc, char** argv) {
    return srint::cli::run({argv + 1, argv + argc});
}
