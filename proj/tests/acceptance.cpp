// One line per acceptance criterion, followed by its individual checks.
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <thread>

#include "gsr/verify.hpp"

int main() {
    gsr::verify::Options o;
    o.threads = std::max(1u, std::thread::hardware_concurrency());
    if (const char* e = std::getenv("GSR_THREADS")) o.threads = std::max(1, std::atoi(e));

    using namespace gsr::verify;
    const std::function<Criterion(const Options&)> all[] = {
        [](const Options& x) { return normalization(x); }, stationary_limit, detailed_symmetry, triangulation, monte_carlo,
        special_functions, greens_limits, cdf_cross_check, figures, chapman_kolmogorov};
    int failed = 0;
    for (auto& run : all) {
        Criterion c = run(o);
        print(c);
        std::fflush(stdout);
        failed += !c.pass();
    }
    std::printf("%d of 10 criteria passed\n", 10 - failed);
    return failed == 0 ? 0 : 1;
}
