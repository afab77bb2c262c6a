#include <iostream>
#include <string>

#include "birot/verify.hpp"

int main(int argc, char** argv) {
    const std::string suite = argc > 1 ? argv[1] : "all";
    const std::string out = argc > 2 ? argv[2] : "verify_out";
    return birot::verify_main(suite, std::cout, out);
}
