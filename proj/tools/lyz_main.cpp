#include <string>
#include <vector>

#include "lyz/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return lyz::cli::cli_main(args);
}
