#include "rehab/hss.hpp"

#include <algorithm>
#include <numeric>

namespace rehab
{

void HssConfig::validate() const
{
    if( levels < 1 || window < 1 )
        throw Error( Errc::InvalidArgument, "HSS needs at least one level and a window of at least one trial" );
    if( !( regress_at < advance_at ) )
        throw Error( Errc::InvalidArgument, "HSS regress threshold must lie below the advance threshold" );
}

HssState HssState::start( HssConfig config, int start_level )
{
    config.validate();
    if( start_level < 1 || start_level > config.levels )
        throw Error( Errc::InvalidArgument, "HSS start level out of range" );
    HssState s;
    s.config = config;
    s.level = start_level;
    for( int l = 1; l < start_level; ++l )
        s.passed.insert( l );
    return s;
}

HssState hss_update( HssState state, const TrialScore& score )
{
    const auto& cfg = state.config;
    state.window.push_back( score.value );
    while( static_cast<int>( state.window.size() ) > cfg.window )
        state.window.pop_front();
    if( static_cast<int>( state.window.size() ) < cfg.window )
        return state;

    const double mean = std::accumulate( state.window.begin(), state.window.end(), 0.0 ) / cfg.window;
    if( mean >= cfg.advance_at && state.level < cfg.levels )
    {
        ++state.level;
        for( int l = 1; l < state.level; ++l )
            state.passed.insert( l );
        state.window.clear();
    }
    else if( mean <= cfg.regress_at && state.level > 1 )
    {
        --state.level;
        state.passed.erase( state.level );
        state.window.clear();
    }
    return state;
}

std::array<int, kJointDims> hss_subgrid( const ActionGrid& grid, int level, int levels )
{
    if( levels < 1 || level < 1 || level > levels )
        throw Error( Errc::InvalidArgument, "HSS level out of range" );
    const double frac = static_cast<double>( level ) / levels;

    auto count_upto = []( const GridAxis& axis, double cap ) {
        int n = 0;
        for( int i = 0; i < axis.samples; ++i )
            if( axis.value( i ) <= cap + 1e-9 )
                n = i + 1;
        return std::max( n, 1 );
    };

    std::array<int, kJointDims> counts{};
    for( int d = 0; d < kJointDims; ++d )
        counts[d] = grid.axes[d].samples;

    const GridAxis& pitch = grid.axes[1];
    const double lift_from = std::max( pitch.min, 0.0 );
    counts[1] = level == levels ? pitch.samples : count_upto( pitch, lift_from + ( pitch.max - lift_from ) * frac );

    const GridAxis& elbow = grid.axes[3];
    counts[3] = level == levels ? elbow.samples : count_upto( elbow, elbow.min + ( elbow.max - elbow.min ) * frac );
    return counts;
}

JointOrientation rog_generate( const ActionGrid& grid, const HssState& hss, Rng& rng )
{
    const auto counts = hss_subgrid( grid, hss.level, hss.config.levels );
    GridIndex idx{};
    for( int d = 0; d < kJointDims; ++d )
        idx[d] = static_cast<int>( rng.index( static_cast<std::uint64_t>( counts[d] ) ) );
    return grid.at( idx );
}

} // namespace rehab
