#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rehab/grid.hpp"
#include "rehab/hss.hpp"
#include "rehab/kinematics.hpp"
#include "rehab/patient.hpp"
#include "rehab/scoring.hpp"
#include "rehab/taskgen.hpp"

namespace rehab
{

enum class Policy
{
    Mcts,
    Rog,
};

const char* to_string( Policy p );
Policy policy_from_string( const std::string& s );

/// What the tree search plans against: a response model fitted to the logged outcomes,
/// the simulated patient's own current profile, or the smoothed per-cell success record.
enum class Estimator
{
    Model,
    Profile,
    Record,
};

const char* to_string( Estimator e );
Estimator estimator_from_string( const std::string& s );

/// Success target that moves linearly from `start` to `end` across `span` trials and
/// then holds. A span of 0 means the session length.
struct TargetSchedule
{
    double start = 0.9;
    double end = 0.6;
    int span = 0;

    double at( int trial, int session_trials ) const;
};

struct SessionConfig
{
    std::string session_id = "session";
    Policy policy = Policy::Mcts;
    Estimator estimator = Estimator::Model;
    int trials = 200;
    UctConfig uct;
    TargetSchedule schedule;
    ActionGrid grid;
    HssConfig hss;
    ArmModel arm;
    std::string patient = "moderate"; ///< profile JSON path or preset name
    std::string prior = "population"; ///< reference profile of the fitted planning model
    ScoringTimes times;
    double inter_trial_gap = 1.0; ///< seconds added to the session clock between trials
    std::uint64_t seed = 0;

    void validate() const;
};

struct TrialRecord
{
    std::string session_id;
    int trial_idx = 0;
    JointOrientation orientation;
    std::array<double, 3> target_xyz{};
    TrialResult outcome = TrialResult::NotSuccessful;
    std::optional<double> completion_time_s;
    double score_value = 0.0;
    int hss_level = 1;
    MasItem mas_item = MasItem::AdvancedHandActivities;
    double target_success = 0.0;
    double predicted_success = 0.0;
    double timestamp = 0.0; ///< simulated seconds since session start

    bool operator==( const TrialRecord& ) const = default;
};

/// Trial taxonomy: raised-arm reaches load postural balance, deep elbow flexion works the
/// upper arm, near-straight reaches are hand placement, the rest are grasp-and-release.
MasItem classify_trial( const JointOrientation& orient );

/// Generate -> spawn -> attempt -> score -> HSS and record update, once per trial.
/// Deterministic in (config, profile).
std::vector<TrialRecord> run_session( const SessionConfig& cfg, const PatientProfile& profile );
std::vector<TrialRecord> run_session( const SessionConfig& cfg );

} // namespace rehab
