#include <doctest.h>

#include "rehab/error.hpp"
#include "rehab/hss.hpp"

using namespace rehab;

namespace
{

HssState feed( HssState s, std::initializer_list<double> values )
{
    for( double v : values )
    {
        TrialScore score;
        score.value = v;
        s = hss_update( std::move( s ), score );
    }
    return s;
}

} // namespace

TEST_CASE( "five perfect scores advance one level" )
{
    const HssState s = feed( HssState::start( {} ), { 1, 1, 1, 1, 1 } );
    CHECK( s.level == 2 );
    CHECK( s.passed == std::set<int>{ 1 } );
    CHECK( s.window.empty() );
}

TEST_CASE( "five zero scores regress one level" )
{
    const HssState s = feed( HssState::start( {}, 2 ), { 0, 0, 0, 0, 0 } );
    CHECK( s.level == 1 );
    CHECK( s.passed.empty() );
}

TEST_CASE( "alternating scores hold the level" )
{
    const HssState s = feed( HssState::start( {}, 2 ), { 1, 0, 1, 0, 1, 0, 1, 0, 1, 0 } );
    CHECK( s.level == 2 );
    CHECK( s.window.size() == 5 );
}

TEST_CASE( "thresholds are inclusive" )
{
    CHECK( feed( HssState::start( {} ), { 0.8, 0.8, 0.8, 0.8, 0.8 } ).level == 2 );
    CHECK( feed( HssState::start( {}, 3 ), { 0.3, 0.3, 0.3, 0.3, 0.3 } ).level == 2 );
    CHECK( feed( HssState::start( {}, 3 ), { 0.31, 0.31, 0.31, 0.31, 0.31 } ).level == 3 );
}

TEST_CASE( "the window restarts after a level change" )
{
    HssState s = feed( HssState::start( {} ), { 1, 1, 1, 1, 1 } );
    s = feed( std::move( s ), { 1, 1, 1, 1 } );
    CHECK( s.level == 2 );
    s = feed( std::move( s ), { 1 } );
    CHECK( s.level == 3 );
    CHECK( s.passed == std::set<int>{ 1, 2 } );
}

TEST_CASE( "levels are bounded" )
{
    CHECK( feed( HssState::start( {}, 4 ), { 1, 1, 1, 1, 1 } ).level == 4 );
    CHECK( feed( HssState::start( {} ), { 0, 0, 0, 0, 0 } ).level == 1 );
}

TEST_CASE( "starting above level one passes the easier levels" )
{
    const HssState s = HssState::start( {}, 4 );
    CHECK( s.passed == std::set<int>{ 1, 2, 3 } );
    CHECK_THROWS_AS( (void)HssState::start( {}, 5 ), Error );
    CHECK_THROWS_AS( (void)HssState::start( {}, 0 ), Error );
}

TEST_CASE( "a regress re-opens the level it enters" )
{
    const HssState s = feed( HssState::start( {}, 3 ), { 0, 0, 0, 0, 0 } );
    CHECK( s.level == 2 );
    CHECK( s.passed == std::set<int>{ 1 } );
}

TEST_CASE( "config validation" )
{
    HssConfig bad;
    bad.regress_at = 0.9;
    CHECK_THROWS_AS( bad.validate(), Error );
    bad = {};
    bad.window = 0;
    CHECK_THROWS_AS( bad.validate(), Error );
}

TEST_CASE( "subgrid widens with the level" )
{
    const ActionGrid grid;
    const auto l1 = hss_subgrid( grid, 1, 4 );
    const auto l2 = hss_subgrid( grid, 2, 4 );
    const auto l4 = hss_subgrid( grid, 4, 4 );
    // Pitch samples are -90, -80, ..., 90: level 1 of 4 caps elevation at 22.5 degrees.
    CHECK( grid.axes[1].value( l1[1] - 1 ) == doctest::Approx( 20.0 ) );
    // Elbow samples are 0, 10, ..., 120: level 1 caps flexion at 30 degrees.
    CHECK( grid.axes[3].value( l1[3] - 1 ) == doctest::Approx( 30.0 ) );
    CHECK( l1[0] == grid.axes[0].samples );
    CHECK( l1[2] == grid.axes[2].samples );
    CHECK( l2[1] > l1[1] );
    CHECK( l2[3] > l1[3] );
    for( int d = 0; d < kJointDims; ++d )
        CHECK( l4[d] == grid.axes[d].samples );
    CHECK_THROWS_AS( (void)hss_subgrid( grid, 5, 4 ), Error );
}

TEST_CASE( "random generator reaches the full grid at the top level" )
{
    const ActionGrid grid;
    const HssState top = HssState::start( {}, 4 );
    Rng rng( 12 );
    double max_pitch = -90.0, max_elbow = 0.0;
    for( int k = 0; k < 5000; ++k )
    {
        const JointOrientation o = rog_generate( grid, top, rng );
        CHECK( grid.on_grid( o ) );
        max_pitch = std::max( max_pitch, o.sh_pitch );
        max_elbow = std::max( max_elbow, o.elbow );
    }
    CHECK( max_pitch == 90.0 );
    CHECK( max_elbow == 120.0 );
}
