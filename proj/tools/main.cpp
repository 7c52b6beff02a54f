#include "ttlat/cli.hpp"

int main(int argc, char** argv) {
    return ttlat::cli::run(std::vector<std::string>(argv + 1, argv + argc));
}
