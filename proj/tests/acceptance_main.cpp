// Acceptance driver: runs the full criterion suite into a scratch tree and
// prints one PASS/FAIL line per criterion.  Exit code 0 only if every
// criterion passes.

#include <cstdlib>
#include <filesystem>
#include <iostream>

#include "lab/acceptance.hpp"

int main() {
    namespace fs = std::filesystem;
    fs::path out = fs::temp_directory_path() / "lab_acceptance";
    if (const char* root = std::getenv("LAB_OUTPUT_ROOT"))
        out = fs::path(root) / "lab_acceptance";
    std::error_code ec;
    fs::remove_all(out, ec);
    const lab::accept::SuiteResult res =
        lab::accept::run_suite(out, std::cout);
    std::cout << "evidence tree: " << out.string() << "\n";
    return res.all_pass ? 0 : 1;
}
