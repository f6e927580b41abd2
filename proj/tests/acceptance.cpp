#include <iostream>

#include "secant/acceptance.hpp"

int main() {
    const auto results = secant::acceptance::run_all(std::cout);
    for (const auto& r : results)
        if (!r.pass) return 1;
    return 0;
}
