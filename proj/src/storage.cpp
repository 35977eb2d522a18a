#include "arb/storage.hpp"

#include <cmath>

namespace arb {

void BatterySpec::validate() const {
    if (!(power > 0) || !(energy > 0)) throw ConfigError("battery: power and energy must be > 0");
    if (!(eta > 0) || eta > 1.0) throw ConfigError("battery: eta must be in (0, 1]");
    if (discharge_cost < 0) throw ConfigError("battery: discharge cost must be >= 0");
    if (intervals_per_hour < 1) throw ConfigError("battery: intervals_per_hour must be >= 1");
}

SoCState soc_step(SoCState s, double discharge, double charge, const BatterySpec& spec,
                  Scale scale) {
    const double limit = power_limit(spec, scale);
    if (discharge < -kSocTolerance || discharge > limit + kSocTolerance)
        throw PowerLimitViolationError("discharge " + std::to_string(discharge) +
                                       " outside [0, " + std::to_string(limit) + "]");
    if (charge < -kSocTolerance || charge > limit + kSocTolerance)
        throw PowerLimitViolationError("charge " + std::to_string(charge) + " outside [0, " +
                                       std::to_string(limit) + "]");
    double e = s.e - discharge / spec.eta + charge * spec.eta;
    if (e < -kSocTolerance || e > spec.energy + kSocTolerance)
        throw SoCOutOfBoundsError("SoC " + std::to_string(e) + " outside [0, " +
                                  std::to_string(spec.energy) + "]");
    return SoCState{std::clamp(e, 0.0, spec.energy)};
}

FeasibilityReport check_schedule(const std::vector<Action>& actions, double e0,
                                 const BatterySpec& spec, Scale scale) {
    FeasibilityReport report;
    const double limit = power_limit(spec, scale);
    double e = e0;
    for (size_t i = 0; i < actions.size(); ++i) {
        const auto& a = actions[i];
        double worst_power = std::max({-a.discharge, a.discharge - limit, -a.charge,
                                       a.charge - limit});
        if (worst_power > kSocTolerance)
            report.violations.push_back({i, "power", worst_power});
        e = e - a.discharge / spec.eta + a.charge * spec.eta;
        double soc_excess = std::max(-e, e - spec.energy);
        if (soc_excess > kSocTolerance)
            report.violations.push_back({i, "soc", soc_excess});
        // Mirror soc_step's clamp so a feasible replay tracks it bit-for-bit.
        e = std::clamp(e, 0.0, spec.energy);
    }
    report.final_soc = e;
    report.feasible = report.violations.empty();
    return report;
}

}  // namespace arb
