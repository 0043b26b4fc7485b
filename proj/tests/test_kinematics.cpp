#include <doctest.h>

#include <cmath>
#include <numbers>

#include "rehab/error.hpp"
#include "rehab/kinematics.hpp"
#include "rehab/rng.hpp"

using namespace rehab;

namespace
{

constexpr double kDeg = std::numbers::pi / 180.0;

} // namespace

TEST_CASE( "forward kinematics of a straight horizontal arm" )
{
    const ArmModel arm;
    const TargetPoint p = forward_kinematics( arm, ChainAngles{ 0.0, 0.0, 0.0 } );
    CHECK( p.x() == doctest::Approx( 0.55 ) );
    CHECK( p.y() == doctest::Approx( 0.0 ) );
    CHECK( p.z() == doctest::Approx( 0.2 ) );
}

TEST_CASE( "forward kinematics with a right-angle elbow" )
{
    const ArmModel arm;
    const TargetPoint p = forward_kinematics( arm, ChainAngles{ std::numbers::pi / 2, 0.0, std::numbers::pi / 2 } );
    CHECK( p.x() == doctest::Approx( 0.0 ).epsilon( 1e-12 ) );
    CHECK( p.y() == doctest::Approx( 0.3 ) );
    CHECK( p.z() == doctest::Approx( 0.45 ) );
}

TEST_CASE( "inverse kinematics recovers elbow-up angles" )
{
    const ArmModel arm;
    const ChainAngles a{ 0.4, -0.3, 1.1 };
    const IkSolution s = inverse_kinematics( arm, forward_kinematics( arm, a ) );
    CHECK_FALSE( s.singular );
    CHECK( s.angles.yaw == doctest::Approx( a.yaw ) );
    CHECK( s.angles.elevation == doctest::Approx( a.elevation ) );
    CHECK( s.angles.elbow == doctest::Approx( a.elbow ) );
}

TEST_CASE( "inverse kinematics at full extension and on the base axis" )
{
    const ArmModel arm;
    const IkSolution straight = inverse_kinematics( arm, TargetPoint( 0.55, 0.0, 0.2 ) );
    CHECK( straight.angles.elbow == doctest::Approx( 0.0 ) );
    CHECK( straight.angles.elevation == doctest::Approx( 0.0 ) );

    const IkSolution overhead = inverse_kinematics( arm, TargetPoint( 0.0, 0.0, 0.6 ) );
    CHECK( overhead.singular );
    CHECK( overhead.angles.yaw == 0.0 );
    CHECK( ( forward_kinematics( arm, overhead.angles ) - TargetPoint( 0.0, 0.0, 0.6 ) ).norm() < 1e-12 );
}

TEST_CASE( "unreachable targets throw" )
{
    const ArmModel arm;
    CHECK_FALSE( reachable( arm, TargetPoint( 0.6, 0.0, 0.2 ) ) );
    CHECK_THROWS_AS( (void)inverse_kinematics( arm, TargetPoint( 0.6, 0.0, 0.2 ) ), Error );
    CHECK_FALSE( reachable( arm, TargetPoint( 0.0, 0.0, 0.22 ) ) );
    try
    {
        (void)inverse_kinematics( arm, TargetPoint( 0.0, 0.0, 0.22 ) );
        FAIL( "expected Unreachable" );
    }
    catch( const Error& e )
    {
        CHECK( e.code() == Errc::Unreachable );
    }
}

TEST_CASE( "kinematics is generic over the scalar type" )
{
    const ArmModelT<float> arm;
    const Eigen::Vector3f p = forward_kinematics( arm, ChainAnglesT<float>{ 0.2f, 0.1f, 0.5f } );
    const auto s = inverse_kinematics( arm, p );
    CHECK( s.angles.elbow == doctest::Approx( 0.5f ).epsilon( 1e-4 ) );

    const ArmModelT<long double> wide;
    const auto q = forward_kinematics( wide, ChainAnglesT<long double>{ 0.2L, 0.1L, 0.5L } );
    CHECK( static_cast<double>( inverse_kinematics( wide, q ).angles.yaw ) == doctest::Approx( 0.2 ) );
}

TEST_CASE( "arm model validation" )
{
    CHECK_NOTHROW( ArmModel{}.validate() );
    CHECK_THROWS_AS( ( ArmModel{ 0.2, 0.0, 0.25 }.validate() ), Error );
}

TEST_CASE( "joint ranges" )
{
    CHECK( in_range( JointOrientation{ 0, 0, 0, 0 } ) );
    CHECK( in_range( JointOrientation{ 90, 90, -90, 120 } ) );
    CHECK_FALSE( in_range( JointOrientation{ 91, 0, 0, 0 } ) );
    CHECK_FALSE( in_range( JointOrientation{ 0, 0, 5, 0 } ) );
    try
    {
        check_range( JointOrientation{ 0, 0, 0, 130 } );
        FAIL( "expected OutOfRange" );
    }
    catch( const Error& e )
    {
        CHECK( e.code() == Errc::OutOfRange );
        CHECK( std::string( e.what() ).find( "elbow" ) != std::string::npos );
    }
}

TEST_CASE( "spawn position matches forward kinematics without roll" )
{
    const ArmModel arm;
    Rng rng( 3 );
    for( int k = 0; k < 200; ++k )
    {
        const JointOrientation o{ rng.uniform( 0, 90 ), rng.uniform( -90, 90 ), 0.0, rng.uniform( 0, 120 ) };
        const TargetPoint expected = forward_kinematics( arm, ChainAngles{ o.sh_yaw * kDeg, o.sh_pitch * kDeg, o.elbow * kDeg } );
        CHECK( ( spawn_position( arm, o ) - expected ).norm() < 1e-12 );
    }
}

TEST_CASE( "roll tilts the elbow plane without changing reach" )
{
    const ArmModel arm;
    const JointOrientation flat{ 0, 0, 0, 90 };
    const JointOrientation rolled{ 0, 0, -90, 90 };
    const TargetPoint a = spawn_position( arm, flat );
    const TargetPoint b = spawn_position( arm, rolled );
    CHECK( ( a - arm.shoulder() ).norm() == doctest::Approx( ( b - arm.shoulder() ).norm() ) );
    CHECK( b.z() == doctest::Approx( arm.l1 ) );
    CHECK( std::abs( b.y() ) == doctest::Approx( arm.l3 ) );
    CHECK( reachable( arm, b ) );

    const JointOrientation straight_rolled{ 30, 20, -60, 0 };
    const JointOrientation straight{ 30, 20, 0, 0 };
    CHECK( ( spawn_position( arm, straight_rolled ) - spawn_position( arm, straight ) ).norm() < 1e-12 );
}

TEST_CASE( "spawn position rejects out-of-range orientations" )
{
    CHECK_THROWS_AS( (void)spawn_position( ArmModel{}, JointOrientation{ 0, 100, 0, 0 } ), Error );
}
