#pragma once

#include <array>
#include <deque>
#include <set>

#include "rehab/grid.hpp"
#include "rehab/rng.hpp"
#include "rehab/scoring.hpp"

namespace rehab
{

struct HssConfig
{
    int levels = 4;
    int window = 5;
    double advance_at = 0.8;
    double regress_at = 0.3;

    void validate() const;
};

/// Hierarchical scoring state. Once a harder level is reached, every easier level is in
/// `passed` and is not tested again unless the player regresses into it.
struct HssState
{
    HssConfig config;
    int level = 1;
    std::deque<double> window;
    std::set<int> passed;

    /// Start at `start_level`, treating the skipped easier levels as passed.
    static HssState start( HssConfig config, int start_level = 1 );
};

/// Appends the score; once the window is full its mean moves the level one step up
/// (>= advance_at) or down (<= regress_at). The window restarts after every level change.
HssState hss_update( HssState state, const TrialScore& score );

/// Number of admissible samples per axis at `level`. Allowed indices are [0, count).
/// Level k of L unlocks the lowest k/L of the above-horizontal pitch range and of the
/// elbow range; yaw and roll stay fully open.
std::array<int, kJointDims> hss_subgrid( const ActionGrid& grid, int level, int levels );

/// Uniform orientation over the subgrid unlocked at the current level.
JointOrientation rog_generate( const ActionGrid& grid, const HssState& hss, Rng& rng );

} // namespace rehab
