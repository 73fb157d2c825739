// One line per acceptance criterion; exit status 0 only when all pass.
// Usage: acceptance [seed] [workers]
#include <cstdlib>
#include <iostream>
#include <string>

#include "mixbound/verify.hpp"

int main(int argc, char** argv) {
    mixbound::VerifyOptions o;
    if (argc > 1) o.seed = std::stoull(argv[1]);
    if (argc > 2) o.workers = std::stoi(argv[2]);
    o.log = &std::cerr;
    const auto rep = mixbound::verify_suite("all", o);
    for (const auto& r : rep.results)
        std::cout << "criterion " << r.id << " [" << r.suite << "] " << (r.pass ? "PASS" : "FAIL") << ": " << r.title
                  << "\n    " << mixbound::to_stable_json(r.detail, 0) << std::endl;
    int failed = 0;
    for (const auto& r : rep.results) failed += !r.pass;
    std::cout << (rep.results.size() - failed) << "/" << rep.results.size() << " criteria pass" << std::endl;
    return failed == 0 ? 0 : 1;
}
