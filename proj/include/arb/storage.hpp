#pragma once

#include <string>
#include <vector>

#include "arb/errors.hpp"

namespace arb {

// Battery ratings. P is hourly energy throughput; one real-time interval may
// move at most P/S.
struct BatterySpec {
    double power = 0.5;           // P, MWh per hour
    double energy = 1.0;          // E, MWh
    double eta = 0.9;             // one-way efficiency
    double discharge_cost = 10.0; // c, $/MWh discharged
    int intervals_per_hour = 12;  // S

    double interval_power() const { return power / intervals_per_hour; }
    void validate() const;
};

enum class Scale { hourly, rt };

inline double power_limit(const BatterySpec& spec, Scale scale) {
    return scale == Scale::hourly ? spec.power : spec.interval_power();
}

// Bound slack absorbed before a violation is reported.
inline constexpr double kSocTolerance = 1e-9;

struct SoCState {
    double e = 0.0;  // MWh
};

// One step of e' = e - p/eta + b*eta with power and SoC bound checks.
SoCState soc_step(SoCState s, double discharge, double charge, const BatterySpec& spec,
                  Scale scale);

struct Action {
    double discharge = 0.0;  // p
    double charge = 0.0;     // b
};

struct Violation {
    size_t index;
    std::string constraint;  // "power", "soc", "simultaneous"
    double magnitude;
};

struct FeasibilityReport {
    bool feasible = true;
    double final_soc = 0.0;
    std::vector<Violation> violations;
};

// Replays the whole sequence; violations are reported, never thrown.
FeasibilityReport check_schedule(const std::vector<Action>& actions, double e0,
                                 const BatterySpec& spec, Scale scale);

}  // namespace arb
