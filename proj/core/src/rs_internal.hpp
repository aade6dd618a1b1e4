#pragma once

#include "rcs/rs_solver.hpp"

namespace rcs::detail {

struct RsWork {
    SegmentedRule xrule, zrule;
    explicit RsWork(int n) : xrule(n), zrule(n) {}
};

struct RsMoments {
    double chi, q, D;
};

// One pass of the symmetric fixed-point map; optionally accumulates the
// distortion metric alongside the two moments.
RsMoments rs_pass(const SystemConfig& cfg, RsWork& work, double chi, double q, bool want_D);

}  // namespace rcs::detail
