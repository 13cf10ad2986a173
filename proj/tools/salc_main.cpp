#include "salc/cli.hpp"

int main(int argc, char** argv) {
    return salc::cli::run(std::vector<std::string>(argv + 1, argv + argc));
}
