// Acceptance suite runner: executes every criterion at its pinned tolerance
// and prints one pass/fail line each. Exit code 0 when all pass, 3 otherwise.

#include <cstdio>
#include <iostream>
#include <string>

#include "core/verify.hpp"

int main(int argc, char** argv) {
    lagedge::ToleranceManifest tol;
    for (int k = 1; k < argc; ++k) {
        const std::string arg = argv[k];
        if (arg == "--tolerance-manifest" && k + 1 < argc) {
            try {
                tol = lagedge::ToleranceManifest::from_json_file(argv[++k]);
            } catch (const std::exception& e) {
                std::fprintf(stderr, "error: %s\n", e.what());
                return 1;
            }
        } else {
            std::fprintf(stderr, "usage: %s [--tolerance-manifest FILE]\n", argv[0]);
            return 1;
        }
    }

    int failures = 0;
    try {
        const auto results = lagedge::run_acceptance(tol, &std::cerr);
        for (const auto& r : results) {
            std::printf("[%s] %d. %s: %s\n", r.pass ? "PASS" : "FAIL", r.id, r.name.c_str(),
                        r.details.c_str());
            if (!r.pass) ++failures;
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "acceptance suite aborted: %s\n", e.what());
        return 2;
    }
    std::printf("%d/9 criteria passed\n", 9 - failures);
    return failures == 0 ? 0 : 3;
}
