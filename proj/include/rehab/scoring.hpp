#pragma once

#include <array>
#include <optional>
#include <span>
#include <string_view>

namespace rehab
{

enum class TrialResult
{
    NotSuccessful,
    PartiallySuccessful,
    Successful,
};

std::string_view to_string( TrialResult r );
TrialResult trial_result_from_string( std::string_view s );

struct TrialOutcome
{
    TrialResult result = TrialResult::NotSuccessful;
    std::optional<double> completion_time; ///< seconds; absent for NotSuccessful
    double hold_required = 0.0;            ///< seconds; 0 for grasp trials
    bool hold_steady = true;
};

struct TrialScore
{
    double base = 0.0;            ///< 1.0, 0.5 or 0.0
    double time_multiplier = 0.0; ///< in [0, 1]
    double value = 0.0;           ///< base * time_multiplier
};

struct ScoringTimes
{
    double best = 2.0;
    double max = 10.0;

    bool operator==( const ScoringTimes& ) const = default;
};

/// Three-case trial score graded by completion time: a successful attempt at the best
/// time earns 1, decaying linearly to 0 at the maximum allowed time. Partial attempts
/// earn a flat 0.5.
TrialScore score_trial( const TrialOutcome& outcome, ScoringTimes times );

inline constexpr double kFrameRate = 30.0;

struct HoldProgress
{
    double elapsed_hold = 0.0;
    int resets = 0;
    bool successful = false;
};

/// Press-and-hold timer over per-frame steadiness flags sampled at 30 fps. Any unsteady
/// frame restarts the timer. Accumulation stops once the hold is complete.
HoldProgress hold_trial_progress( std::span<const bool> steady_frames, double hold_required );

/// Per-frame steadiness: hand displacement from the press position under `radius` metres.
bool is_steady( double displacement, double radius = 0.03 );

enum class MasItem
{
    UpperArmFunction,
    HandMovements,
    AdvancedHandActivities,
    PosturalBalance,
};

inline constexpr int kMasItemCount = 4;

std::string_view to_string( MasItem item );
MasItem mas_item_from_string( std::string_view s );

struct TaggedScore
{
    MasItem item = MasItem::AdvancedHandActivities;
    TrialScore score;
};

struct SessionScore
{
    double total = 0.0;
    std::array<double, kMasItemCount> per_mas_item{};

    double item_total( MasItem item ) const { return per_mas_item[static_cast<int>( item )]; }
};

SessionScore session_score( std::span<const TaggedScore> scores );

} // namespace rehab
