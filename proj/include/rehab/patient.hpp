#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "rehab/grid.hpp"
#include "rehab/rng.hpp"
#include "rehab/scoring.hpp"

namespace rehab
{

/// Parametric response model of a simulated patient. Angles in degrees, times in seconds.
struct PatientProfile
{
    std::array<double, kJointDims> comfort_limits{ 60.0, 60.0, 60.0, 90.0 };
    std::array<double, kJointDims> softness{ 10.0, 10.0, 10.0, 10.0 };
    double p_max = 0.95;
    double base_time = 2.5;
    double time_per_deg = 0.01;
    double partial_fraction = 0.5;
    double fatigue_rate = 0.0;

    void validate() const;
};

PatientProfile profile_from_json( const nlohmann::json& j );
nlohmann::json to_json( const PatientProfile& p );
PatientProfile load_profile( const std::filesystem::path& path );

/// Built-in profiles: "mild", "moderate", "severe", and "population", a generic
/// reference profile used as the prior of the fitted planning model.
PatientProfile preset_profile( std::string_view name );

/// Loads `source` as a JSON file when it exists, otherwise as a preset name (an optional
/// ".json" suffix and directory are ignored for preset lookup).
PatientProfile resolve_profile( const std::string& source );

/// Demand of one dimension: distance of the angle from the rest pose (all zeros).
inline double demand( const JointOrientation& orient, int dim ) { return std::abs( orient[dim] ); }

/// p_max times a product of per-joint logistic comfort factors.
double predict_success( const PatientProfile& profile, const JointOrientation& orient );

/// Probability of a successful, partial and failed attempt, in that order.
std::array<double, 3> outcome_distribution( const PatientProfile& profile, const JointOrientation& orient );

/// Stateful patient: each attempt draws an outcome and then applies fatigue to p_max.
class SimulatedPatient
{
public:
    explicit SimulatedPatient( PatientProfile profile );

    /// Profile with the fatigue accumulated so far folded into p_max.
    const PatientProfile& current() const { return current_; }
    const PatientProfile& baseline() const { return baseline_; }
    int trials() const { return trials_; }

    TrialOutcome attempt( const JointOrientation& orient, Rng& rng );

private:
    PatientProfile baseline_;
    PatientProfile current_;
    int trials_ = 0;
};

/// Running per-cell success tallies over an action grid.
class PerformanceRecord
{
public:
    explicit PerformanceRecord( const ActionGrid& grid );

    void update( const JointOrientation& orient, const TrialOutcome& outcome );

    int attempts( const JointOrientation& orient ) const;
    int successes( const JointOrientation& orient ) const;

    /// Laplace-smoothed success ratio of the cell containing `orient`. Unvisited cells
    /// borrow the nearest visited cell; with nothing visited the prior 1/2 is returned.
    double estimate( const JointOrientation& orient ) const;

    const ActionGrid& grid() const { return grid_; }

private:
    double smoothed( std::size_t cell ) const;

    ActionGrid grid_;
    std::vector<int> attempts_;
    std::vector<int> successes_;
    std::vector<std::size_t> visited_;
};

/// Prior widths and predictive settings of the fitted planning model.
struct FitOptions
{
    double limit_sd = 20.0;      ///< degrees
    double p_max_logit_sd = 1.0; ///< logit scale
    double fatigue_sd = 0.001;   ///< per trial
    /// Parameter draws from the Laplace approximation averaged by `predict`; 0 predicts
    /// with the point estimate.
    int predictive_draws = 32;
};

/// Patient model re-fitted to logged outcomes. Comfort limits, p_max and the fatigue rate
/// are maximum a posteriori estimates under independent Gaussian priors centred on a
/// reference profile; observation k is taken to have happened at trial k. Softness,
/// timing and the partial split keep their reference values. Every update refits by
/// Fisher scoring from the previous estimate. Predictions average the success model over
/// draws from the Gaussian approximation of the posterior.
class FittedPatientModel
{
public:
    explicit FittedPatientModel( PatientProfile prior, FitOptions options = {} );

    void update( const JointOrientation& orient, const TrialOutcome& outcome );

    /// Fitted profile at the start of the session (before fatigue).
    const PatientProfile& profile() const { return fitted_; }

    /// Fitted profile at the next trial, with fatigue applied to p_max.
    const PatientProfile& current() const { return current_; }

    /// Posterior predictive success probability at the next trial. Per-angle comfort
    /// factors are memoized, so concurrent calls on one instance are not safe.
    double predict( const JointOrientation& orient ) const;
    std::size_t observations() const { return outcomes_.size(); }

    /// Log posterior of the current estimate, up to a constant.
    double log_posterior() const { return log_posterior( parameters() ); }

private:
    static constexpr int kParams = kJointDims + 2;
    using Params = Eigen::Matrix<double, kParams, 1>;

    Params parameters() const;
    PatientProfile with( const Params& theta ) const;
    double log_posterior( const Params& theta ) const;
    Eigen::Matrix<double, kParams, kParams> information( const Params& theta, Params* score ) const;
    void refit();
    void draw_predictive( const Params& theta );

    PatientProfile prior_;
    PatientProfile fitted_;
    PatientProfile current_;
    std::vector<PatientProfile> draws_;
    Eigen::VectorXd draw_p_max_;
    struct Factor
    {
        double angle;
        Eigen::VectorXd value; ///< comfort factor of each draw
    };
    mutable std::array<std::vector<Factor>, kJointDims> factors_;
    FitOptions options_;
    Params prior_mean_;
    Params prior_precision_;
    std::vector<JointOrientation> orients_;
    std::vector<bool> outcomes_;
};

} // namespace rehab
