// One PASS/FAIL line per acceptance criterion at seed 42. Exits non-zero when
// any criterion fails.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <string>

#include "qmr/acceptance.hpp"

namespace {

void report(const qmr::CriterionResult& r, int& failures) {
    if (!r.passed) ++failures;
    std::printf("%s criterion %s (%s): %s [%.1f s]\n", r.passed ? "PASS" : "FAIL", r.id.c_str(), r.title.c_str(),
                r.summary.c_str(), r.seconds);
    std::fflush(stdout);
}

}  // namespace

int main() {
    constexpr std::uint64_t seed = 42;
    int failures = 0;
    for (const auto& id : qmr::criterion_ids()) {
        try {
            report(qmr::run_criterion(id, seed), failures);
        } catch (const std::exception& e) {
            ++failures;
            std::printf("FAIL criterion %s: exception: %s\n", id.c_str(), e.what());
        }
    }
    try {
        const auto out = std::filesystem::temp_directory_path() / "qmr_acceptance_invariants";
        std::filesystem::remove_all(out);
        report(qmr::criterion_invariants(std::string(QMR_CONFIG_DIR) + "/invariants_campaign.json", out.string()),
               failures);
    } catch (const std::exception& e) {
        ++failures;
        std::printf("FAIL criterion 9: exception: %s\n", e.what());
    }
    std::printf("%d criterion(s) failed\n", failures);
    return failures == 0 ? 0 : 1;
}
