#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "aoi_relay/link_model.hpp"

namespace aoi_relay {

struct OracleCheck {
    std::string name;
    bool passed = false;
    double measured = 0.0;
    double tolerance = 0.0;
    std::string detail;
};

struct OracleOptions {
    std::uint64_t seed = 1;
    int replications = 10;
    double horizon_s = 2.0e4;
};

/// Cross-checks for one configuration: closed form against both quadrature
/// kernels on each hop, the product form of the two-hop error, analytic AAoI
/// against replicated simulation, simulated service/wait moments against the
/// queueing formulas, and the simulated fading round-failure rate against
/// the exact-kernel quadrature. The configuration must be stable.
std::vector<OracleCheck> run_oracle_suite(const SystemConfig& cfg, const OracleOptions& opts);

}  // namespace aoi_relay
