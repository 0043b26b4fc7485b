#include "rehab/session.hpp"

#include <algorithm>

namespace rehab
{

const char* to_string( Policy p ) { return p == Policy::Mcts ? "mcts" : "rog"; }

Policy policy_from_string( const std::string& s )
{
    if( s == "mcts" )
        return Policy::Mcts;
    if( s == "rog" )
        return Policy::Rog;
    throw Error( Errc::Config, "policy must be 'mcts' or 'rog', got '" + s + "'" );
}

const char* to_string( Estimator e )
{
    switch( e )
    {
    case Estimator::Model: return "model";
    case Estimator::Profile: return "profile";
    case Estimator::Record: return "record";
    }
    return "model";
}

Estimator estimator_from_string( const std::string& s )
{
    if( s == "model" )
        return Estimator::Model;
    if( s == "profile" )
        return Estimator::Profile;
    if( s == "record" )
        return Estimator::Record;
    throw Error( Errc::Config, "estimator must be 'model', 'profile' or 'record', got '" + s + "'" );
}

double TargetSchedule::at( int trial, int session_trials ) const
{
    const int n = span > 0 ? span : session_trials;
    if( n <= 1 )
        return start;
    const double frac = std::min( 1.0, static_cast<double>( trial ) / static_cast<double>( n - 1 ) );
    return start + ( end - start ) * frac;
}

void SessionConfig::validate() const
{
    if( trials < 1 )
        throw Error( Errc::Config, "trials must be at least 1" );
    if( session_id.empty() )
        throw Error( Errc::Config, "session id must not be empty" );
    for( double t : { schedule.start, schedule.end } )
        if( !( t > 0.0 && t < 1.0 ) )
            throw Error( Errc::Config, "target success values must lie in (0, 1)" );
    if( schedule.span < 0 )
        throw Error( Errc::Config, "target schedule span must be non-negative" );
    UctConfig probe = uct;
    probe.target_success = schedule.start;
    probe.validate();
    grid.validate();
    hss.validate();
    arm.validate();
    if( !( times.best > 0.0 && times.best < times.max ) )
        throw Error( Errc::InvalidTimes, "need 0 < best_time < max_time" );
    if( !( inter_trial_gap >= 0.0 ) )
        throw Error( Errc::Config, "inter-trial gap must be non-negative" );
}

MasItem classify_trial( const JointOrientation& orient )
{
    if( orient.sh_pitch > 45.0 )
        return MasItem::PosturalBalance;
    if( orient.elbow >= 60.0 )
        return MasItem::UpperArmFunction;
    if( orient.elbow <= 20.0 )
        return MasItem::HandMovements;
    return MasItem::AdvancedHandActivities;
}

std::vector<TrialRecord> run_session( const SessionConfig& cfg, const PatientProfile& profile )
{
    cfg.validate();
    SimulatedPatient patient( profile );
    PerformanceRecord record( cfg.grid );
    FittedPatientModel fitted( resolve_profile( cfg.prior ) );
    HssState hss = HssState::start( cfg.hss );
    Rng generator_rng = Rng::stream( cfg.seed, 0 );
    Rng patient_rng = Rng::stream( cfg.seed, 1 );

    std::vector<TrialRecord> log;
    log.reserve( static_cast<std::size_t>( cfg.trials ) );
    double clock = 0.0;
    for( int t = 0; t < cfg.trials; ++t )
    {
        const double target = cfg.schedule.at( t, cfg.trials );
        const PatientProfile snapshot = patient.current();

        JointOrientation orient;
        if( cfg.policy == Policy::Mcts )
        {
            UctConfig uct = cfg.uct;
            uct.target_success = target;
            SuccessModel model;
            switch( cfg.estimator )
            {
            case Estimator::Model:
                model = [&fitted]( const JointOrientation& o ) { return fitted.predict( o ); };
                break;
            case Estimator::Profile:
                model = [&snapshot]( const JointOrientation& o ) { return predict_success( snapshot, o ); };
                break;
            case Estimator::Record:
                model = [&record]( const JointOrientation& o ) { return record.estimate( o ); };
                break;
            }
            orient = mcts_generate( cfg.grid, model, uct, generator_rng );
        }
        else
            orient = rog_generate( cfg.grid, hss, generator_rng );

        const TargetPoint xyz = spawn_position( cfg.arm, orient );
        const TrialOutcome outcome = patient.attempt( orient, patient_rng );
        const TrialScore score = score_trial( outcome, cfg.times );
        const int level_played = hss.level;
        hss = hss_update( std::move( hss ), score );
        record.update( orient, outcome );
        if( cfg.policy == Policy::Mcts && cfg.estimator == Estimator::Model )
            fitted.update( orient, outcome );

        clock += outcome.completion_time.value_or( cfg.times.max ) + cfg.inter_trial_gap;

        TrialRecord r;
        r.session_id = cfg.session_id;
        r.trial_idx = t;
        r.orientation = orient;
        r.target_xyz = { xyz.x(), xyz.y(), xyz.z() };
        r.outcome = outcome.result;
        r.completion_time_s = outcome.completion_time;
        r.score_value = score.value;
        r.hss_level = level_played;
        r.mas_item = classify_trial( orient );
        r.target_success = target;
        r.predicted_success = predict_success( snapshot, orient );
        r.timestamp = clock;
        log.push_back( std::move( r ) );
    }
    return log;
}

std::vector<TrialRecord> run_session( const SessionConfig& cfg ) { return run_session( cfg, resolve_profile( cfg.patient ) ); }

} // namespace rehab
