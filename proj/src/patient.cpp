#include "rehab/patient.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

namespace rehab
{

namespace
{

constexpr double kLaplaceAlpha = 1.0;
/// Completion-time noise, as a fraction of base_time.
constexpr double kTimeNoise = 0.1;

double sigmoid( double z ) { return 1.0 / ( 1.0 + std::exp( -z ) ); }

std::array<double, kJointDims> per_joint( const nlohmann::json& j, const char* key )
{
    if( !j.contains( key ) || !j.at( key ).is_object() )
        throw Error( Errc::Config, std::string( "patient profile: '" ) + key + "' must be an object" );
    std::array<double, kJointDims> out{};
    for( int d = 0; d < kJointDims; ++d )
        out[d] = j.at( key ).at( kJointNames[d] ).get<double>();
    return out;
}

} // namespace

void PatientProfile::validate() const
{
    for( int d = 0; d < kJointDims; ++d )
    {
        const double reach = std::max( std::abs( kJointRanges[d].min ), std::abs( kJointRanges[d].max ) );
        if( !( comfort_limits[d] >= 0.0 && comfort_limits[d] <= reach ) )
            throw Error( Errc::InvalidArgument, std::string( "comfort limit for " ) + kJointNames[d] + " outside joint range" );
        if( !( softness[d] > 0.0 ) )
            throw Error( Errc::InvalidArgument, std::string( "softness for " ) + kJointNames[d] + " must be positive" );
    }
    if( !( p_max >= 0.0 && p_max <= 1.0 ) )
        throw Error( Errc::InvalidArgument, "p_max must lie in [0, 1]" );
    if( !( base_time > 0.0 && time_per_deg >= 0.0 ) )
        throw Error( Errc::InvalidArgument, "base_time must be positive and time_per_deg non-negative" );
    if( !( partial_fraction >= 0.0 && partial_fraction <= 1.0 ) )
        throw Error( Errc::InvalidArgument, "partial_fraction must lie in [0, 1]" );
    if( !( fatigue_rate >= 0.0 && fatigue_rate <= 1.0 ) )
        throw Error( Errc::InvalidArgument, "fatigue_rate must lie in [0, 1]" );
}

PatientProfile profile_from_json( const nlohmann::json& j )
{
    PatientProfile p;
    try
    {
        p.comfort_limits = per_joint( j, "comfort_limits" );
        p.softness = per_joint( j, "softness" );
        p.p_max = j.at( "p_max" ).get<double>();
        p.base_time = j.at( "base_time" ).get<double>();
        p.time_per_deg = j.at( "time_per_deg" ).get<double>();
        p.partial_fraction = j.at( "partial_fraction" ).get<double>();
        p.fatigue_rate = j.at( "fatigue_rate" ).get<double>();
    }
    catch( const nlohmann::json::exception& e )
    {
        throw Error( Errc::Config, std::string( "patient profile: " ) + e.what() );
    }
    p.validate();
    return p;
}

nlohmann::json to_json( const PatientProfile& p )
{
    nlohmann::json limits, soft;
    for( int d = 0; d < kJointDims; ++d )
    {
        limits[kJointNames[d]] = p.comfort_limits[d];
        soft[kJointNames[d]] = p.softness[d];
    }
    return { { "comfort_limits", limits }, { "softness", soft },     { "p_max", p.p_max },
             { "base_time", p.base_time }, { "time_per_deg", p.time_per_deg }, { "partial_fraction", p.partial_fraction },
             { "fatigue_rate", p.fatigue_rate } };
}

PatientProfile load_profile( const std::filesystem::path& path )
{
    std::ifstream in( path );
    if( !in )
        throw Error( Errc::Io, "cannot open patient profile " + path.string() );
    nlohmann::json j;
    try
    {
        in >> j;
    }
    catch( const nlohmann::json::exception& e )
    {
        throw Error( Errc::Config, path.string() + ": " + e.what() );
    }
    return profile_from_json( j );
}

PatientProfile preset_profile( std::string_view name )
{
    PatientProfile p;
    if( name == "mild" )
    {
        p.comfort_limits = { 75.0, 70.0, 70.0, 105.0 };
        p.softness = { 8.0, 8.0, 8.0, 8.0 };
        p.p_max = 0.98;
        p.base_time = 2.2;
        p.time_per_deg = 0.008;
        p.partial_fraction = 0.5;
        p.fatigue_rate = 0.0002;
    }
    else if( name == "moderate" )
    {
        p.comfort_limits = { 50.0, 40.0, 45.0, 70.0 };
        p.softness = { 10.0, 10.0, 10.0, 12.0 };
        p.p_max = 0.95;
        p.base_time = 2.6;
        p.time_per_deg = 0.012;
        p.partial_fraction = 0.5;
        p.fatigue_rate = 0.0005;
    }
    else if( name == "severe" )
    {
        p.comfort_limits = { 30.0, 25.0, 25.0, 45.0 };
        p.softness = { 8.0, 8.0, 8.0, 10.0 };
        p.p_max = 0.9;
        p.base_time = 3.2;
        p.time_per_deg = 0.02;
        p.partial_fraction = 0.6;
        p.fatigue_rate = 0.001;
    }
    else if( name != "population" )
        throw Error( Errc::Config, "unknown patient preset '" + std::string( name ) + "'" );
    return p;
}

PatientProfile resolve_profile( const std::string& source )
{
    const std::filesystem::path path( source );
    if( std::filesystem::exists( path ) )
        return load_profile( path );
    const std::string stem = path.stem().string();
    for( const char* name : { "mild", "moderate", "severe", "population" } )
        if( stem == name )
            return preset_profile( name );
    throw Error( Errc::Io, "patient profile '" + source + "' is neither a file nor a preset" );
}

double predict_success( const PatientProfile& profile, const JointOrientation& orient )
{
    double p = profile.p_max;
    for( int d = 0; d < kJointDims; ++d )
        p *= sigmoid( ( profile.comfort_limits[d] - demand( orient, d ) ) / profile.softness[d] );
    return p;
}

std::array<double, 3> outcome_distribution( const PatientProfile& profile, const JointOrientation& orient )
{
    const double success = predict_success( profile, orient );
    const double partial = ( 1.0 - success ) * profile.partial_fraction;
    return { success, partial, 1.0 - success - partial };
}

SimulatedPatient::SimulatedPatient( PatientProfile profile )
    : baseline_( profile ), current_( profile )
{
    baseline_.validate();
}

TrialOutcome SimulatedPatient::attempt( const JointOrientation& orient, Rng& rng )
{
    check_range( orient );
    TrialOutcome out;
    const double p = predict_success( current_, orient );
    const double u = rng.uniform();
    if( u < p )
        out.result = TrialResult::Successful;
    else if( rng.uniform() < current_.partial_fraction )
        out.result = TrialResult::PartiallySuccessful;
    else
        out.result = TrialResult::NotSuccessful;

    double total_demand = 0.0;
    for( int d = 0; d < kJointDims; ++d )
        total_demand += demand( orient, d );
    const double t = current_.base_time + current_.time_per_deg * total_demand + rng.normal( 0.0, kTimeNoise * current_.base_time );
    if( out.result != TrialResult::NotSuccessful )
        out.completion_time = std::max( t, 1.0 / kFrameRate );

    ++trials_;
    current_.p_max = baseline_.p_max * std::pow( 1.0 - baseline_.fatigue_rate, trials_ );
    return out;
}

PerformanceRecord::PerformanceRecord( const ActionGrid& grid )
    : grid_( grid ), attempts_( grid.cell_count(), 0 ), successes_( grid.cell_count(), 0 )
{
    grid_.validate();
}

void PerformanceRecord::update( const JointOrientation& orient, const TrialOutcome& outcome )
{
    const std::size_t cell = grid_.cell_id( grid_.nearest( orient ) );
    if( attempts_[cell] == 0 )
        visited_.push_back( cell );
    ++attempts_[cell];
    if( outcome.result == TrialResult::Successful )
        ++successes_[cell];
}

int PerformanceRecord::attempts( const JointOrientation& orient ) const
{
    return attempts_[grid_.cell_id( grid_.nearest( orient ) )];
}

int PerformanceRecord::successes( const JointOrientation& orient ) const
{
    return successes_[grid_.cell_id( grid_.nearest( orient ) )];
}

double PerformanceRecord::smoothed( std::size_t cell ) const
{
    return ( successes_[cell] + kLaplaceAlpha ) / ( attempts_[cell] + 2.0 * kLaplaceAlpha );
}

double PerformanceRecord::estimate( const JointOrientation& orient ) const
{
    const GridIndex idx = grid_.nearest( orient );
    const std::size_t cell = grid_.cell_id( idx );
    if( attempts_[cell] > 0 || visited_.empty() )
        return smoothed( cell );

    // Nearest visited cell in normalized index space; ties go to the earliest visit.
    double best_dist = std::numeric_limits<double>::infinity();
    std::size_t best = visited_.front();
    for( std::size_t v : visited_ )
    {
        const GridIndex other = grid_.index_of( v );
        double dist = 0.0;
        for( int d = 0; d < kJointDims; ++d )
        {
            const int span = std::max( grid_.axes[d].samples - 1, 1 );
            const double diff = static_cast<double>( other[d] - idx[d] ) / span;
            dist += diff * diff;
        }
        if( dist < best_dist )
        {
            best_dist = dist;
            best = v;
        }
    }
    return smoothed( best );
}

FittedPatientModel::FittedPatientModel( PatientProfile prior, FitOptions options )
    : prior_( std::move( prior ) ), fitted_( prior_ ), current_( prior_ ), options_( options )
{
    prior_.validate();
    if( !( options.limit_sd > 0.0 && options.p_max_logit_sd > 0.0 && options.fatigue_sd > 0.0 ) )
        throw Error( Errc::InvalidArgument, "prior standard deviations must be positive" );
    if( options.predictive_draws < 0 )
        throw Error( Errc::InvalidArgument, "predictive draws must be non-negative" );
    if( !( prior_.p_max > 0.0 && prior_.p_max < 1.0 ) )
        throw Error( Errc::InvalidArgument, "prior p_max must lie strictly inside (0, 1)" );
    prior_mean_ = parameters();
    prior_precision_.head<kJointDims>().setConstant( 1.0 / ( options.limit_sd * options.limit_sd ) );
    prior_precision_[kJointDims] = 1.0 / ( options.p_max_logit_sd * options.p_max_logit_sd );
    prior_precision_[kJointDims + 1] = 1.0 / ( options.fatigue_sd * options.fatigue_sd );
    draw_predictive( prior_mean_ );
}

FittedPatientModel::Params FittedPatientModel::parameters() const
{
    Params theta;
    for( int d = 0; d < kJointDims; ++d )
        theta[d] = fitted_.comfort_limits[d];
    theta[kJointDims] = std::log( fitted_.p_max / ( 1.0 - fitted_.p_max ) );
    theta[kJointDims + 1] = fitted_.fatigue_rate;
    return theta;
}

PatientProfile FittedPatientModel::with( const Params& theta ) const
{
    constexpr double kMaxFatigue = 0.05;
    PatientProfile p = prior_;
    for( int d = 0; d < kJointDims; ++d )
    {
        const double reach = std::max( std::abs( kJointRanges[d].min ), std::abs( kJointRanges[d].max ) );
        p.comfort_limits[d] = std::clamp( theta[d], 0.0, reach );
    }
    p.p_max = sigmoid( theta[kJointDims] );
    p.fatigue_rate = std::clamp( theta[kJointDims + 1], 0.0, kMaxFatigue );
    return p;
}

namespace
{

double clamp_probability( double q ) { return std::clamp( q, 1e-12, 1.0 - 1e-12 ); }

double fatigued( const PatientProfile& p, std::size_t trial )
{
    return p.p_max * std::pow( 1.0 - p.fatigue_rate, static_cast<double>( trial ) );
}

} // namespace

double FittedPatientModel::log_posterior( const Params& theta ) const
{
    PatientProfile p = with( theta );
    const double p_max = p.p_max;
    const double keep = 1.0 - p.fatigue_rate;
    double decay = 1.0;
    double lp = -0.5 * ( theta - prior_mean_ ).cwiseAbs2().dot( prior_precision_ );
    for( std::size_t i = 0; i < orients_.size(); ++i, decay *= keep )
    {
        p.p_max = p_max * decay;
        const double q = clamp_probability( predict_success( p, orients_[i] ) );
        lp += outcomes_[i] ? std::log( q ) : std::log1p( -q );
    }
    return lp;
}

void FittedPatientModel::update( const JointOrientation& orient, const TrialOutcome& outcome )
{
    orients_.push_back( orient );
    outcomes_.push_back( outcome.result == TrialResult::Successful );
    refit();
}

Eigen::Matrix<double, FittedPatientModel::kParams, FittedPatientModel::kParams> FittedPatientModel::information( const Params& theta,
                                                                                                           Params* score ) const
{
    PatientProfile p = with( theta );
    const double p_max = p.p_max;
    Params s = -prior_precision_.cwiseProduct( theta - prior_mean_ );
    Eigen::Matrix<double, kParams, kParams> info = prior_precision_.asDiagonal();
    const double keep = 1.0 - p.fatigue_rate;
    double decay = 1.0;
    for( std::size_t i = 0; i < orients_.size(); ++i, decay *= keep )
    {
        // g = d log q / d theta; the Bernoulli score is (y - q) / (1 - q) * g.
        Params g;
        for( int d = 0; d < kJointDims; ++d )
            g[d] = ( 1.0 - sigmoid( ( p.comfort_limits[d] - demand( orients_[i], d ) ) / p.softness[d] ) ) / p.softness[d];
        g[kJointDims] = 1.0 - p_max;
        g[kJointDims + 1] = -static_cast<double>( i ) / keep;
        p.p_max = p_max * decay;
        const double q = clamp_probability( predict_success( p, orients_[i] ) );
        const double y = outcomes_[i] ? 1.0 : 0.0;
        s += ( y - q ) / ( 1.0 - q ) * g;
        info += q / ( 1.0 - q ) * g * g.transpose();
    }
    if( score )
        *score = s;
    return info;
}

void FittedPatientModel::refit()
{
    constexpr int kMaxSteps = 25;
    Params theta = parameters();
    double current = log_posterior( theta );
    for( int step = 0; step < kMaxSteps; ++step )
    {
        Params score;
        const auto info = information( theta, &score );
        const Params delta = info.ldlt().solve( score );
        double scale = 1.0;
        bool improved = false;
        for( int half = 0; half < 30; ++half, scale *= 0.5 )
        {
            const Params trial = theta + scale * delta;
            const double lp = log_posterior( trial );
            if( lp >= current )
            {
                theta = trial;
                current = lp;
                improved = true;
                break;
            }
        }
        if( !improved || ( scale * delta ).cwiseAbs().maxCoeff() < 1e-7 )
            break;
    }
    fitted_ = with( theta );
    current_ = fitted_;
    current_.p_max = fatigued( fitted_, orients_.size() );
    draw_predictive( theta );
}

void FittedPatientModel::draw_predictive( const Params& theta )
{
    draws_.clear();
    for( auto& f : factors_ )
        f.clear();
    if( options_.predictive_draws == 0 )
        return;
    const Eigen::LLT<Eigen::Matrix<double, kParams, kParams>> chol( information( theta, nullptr ) );
    Rng rng = Rng::stream( 0x6669747465640000ULL, orients_.size() );
    for( int k = 0; k < options_.predictive_draws; ++k )
    {
        Params z;
        for( auto& v : z )
            v = rng.normal();
        // information = L L^T, so L^{-T} z has the posterior covariance.
        const Params sample = theta + chol.matrixU().solve( z );
        PatientProfile p = with( sample );
        p.p_max = fatigued( p, orients_.size() );
        draws_.push_back( p );
    }
    draw_p_max_.resize( options_.predictive_draws );
    for( int k = 0; k < options_.predictive_draws; ++k )
        draw_p_max_[k] = draws_[static_cast<std::size_t>( k )].p_max;
}

double FittedPatientModel::predict( const JointOrientation& orient ) const
{
    if( draws_.empty() )
        return predict_success( current_, orient );
    Eigen::ArrayXd prod = draw_p_max_.array();
    for( int d = 0; d < kJointDims; ++d )
    {
        auto& cache = factors_[static_cast<std::size_t>( d )];
        const double angle = orient[d];
        auto it = std::find_if( cache.begin(), cache.end(), [angle]( const Factor& f ) { return f.angle == angle; } );
        if( it == cache.end() )
        {
            Factor f{ angle, Eigen::VectorXd( static_cast<Eigen::Index>( draws_.size() ) ) };
            for( std::size_t k = 0; k < draws_.size(); ++k )
                f.value[static_cast<Eigen::Index>( k )] =
                    sigmoid( ( draws_[k].comfort_limits[d] - demand( orient, d ) ) / draws_[k].softness[d] );
            cache.push_back( std::move( f ) );
            it = std::prev( cache.end() );
        }
        prod *= it->value.array();
    }
    return prod.mean();
}

} // namespace rehab
