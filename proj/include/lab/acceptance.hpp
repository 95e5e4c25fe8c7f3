#pragma once
// Desk-scale acceptance suite: one deterministic pass/fail verdict per
// criterion, with all tolerances pinned in code.  Each criterion writes its
// numeric evidence (CSV/JSON) into an output tree; the final criterion
// reruns the whole tree and requires byte-identical output.

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

namespace lab::accept {

struct CriterionResult {
    int index = 0;
    std::string name;
    bool pass = false;
    std::string detail;  // measured numbers and pinned tolerances
    double seconds = 0.0;
};

// Criteria 1-8; writes evidence files under `tree`.
std::vector<CriterionResult> run_criteria(const std::filesystem::path& tree);

struct SuiteResult {
    std::vector<CriterionResult> results;
    bool all_pass = false;
};

// Full suite: runs the criteria twice (tree1/, tree2/ under outdir),
// compares the trees byte-for-byte as criterion 9, and logs one line per
// criterion.
SuiteResult run_suite(const std::filesystem::path& outdir, std::ostream& log);

}  // namespace lab::accept
