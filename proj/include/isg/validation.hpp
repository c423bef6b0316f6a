#ifndef ISG_VALIDATION_HPP
#define ISG_VALIDATION_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace isg {

struct CheckResult
{
    std::string name;
    bool passed = false;
    std::string detail;
};

struct SuiteOptions
{
    int oracle_points = 100;          ///< random (r, r') pairs per scheme
    std::uint64_t seed = 20240607;
    int n_phi = 256;
    int n_z = 400;
};

/**
 * Invariant suite over the Tm:YAG presets: oracle equivalence, population
 * conservation, interlaced point symmetry, passivity, efficiency ordering,
 * replica cancellation, determinism and grid-doubling stability.
 * `progress`, when set, is called after each check.
 */
std::vector<CheckResult> run_invariant_suite(const SuiteOptions& options = {},
                                             const std::function<void(const CheckResult&)>& progress = {});

} // namespace isg

#endif // ISG_VALIDATION_HPP
