#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "rehab/error.hpp"

namespace rehab
{

/// Three-segment arm chain. The base sits at the origin with z up; the shoulder is
/// l1 above it, followed by the upper arm (l2) and the forearm (l3).
template <typename Scalar>
struct ArmModelT
{
    Scalar l1{ 0.2 };
    Scalar l2{ 0.3 };
    Scalar l3{ 0.25 };

    Scalar reach() const { return l2 + l3; }
    Eigen::Matrix<Scalar, 3, 1> shoulder() const { return { Scalar( 0 ), Scalar( 0 ), l1 }; }

    void validate() const
    {
        if( !( l1 > 0 && l2 > 0 && l3 > 0 ) )
            throw Error( Errc::InvalidArgument, "arm segment lengths must be positive" );
    }
};

/// Joint angles of the 3-DOF chain in radians: base yaw, shoulder elevation, elbow flexion.
template <typename Scalar>
struct ChainAnglesT
{
    Scalar yaw{ 0 };
    Scalar elevation{ 0 };
    Scalar elbow{ 0 };
};

template <typename Scalar>
struct IkSolutionT
{
    ChainAnglesT<Scalar> angles;
    /// Target on the vertical axis through the base; yaw is undefined there and reported as 0.
    bool singular = false;
};

/// Shoulder/elbow orientation in degrees as exposed by the game menu.
struct JointOrientation
{
    double sh_yaw = 0.0;
    double sh_pitch = 0.0;
    double sh_roll = 0.0;
    double elbow = 0.0;

    double operator[]( int dim ) const
    {
        switch( dim )
        {
        case 0: return sh_yaw;
        case 1: return sh_pitch;
        case 2: return sh_roll;
        default: return elbow;
        }
    }
    double& operator[]( int dim )
    {
        switch( dim )
        {
        case 0: return sh_yaw;
        case 1: return sh_pitch;
        case 2: return sh_roll;
        default: return elbow;
        }
    }

    bool operator==( const JointOrientation& ) const = default;
};

inline constexpr int kJointDims = 4;

struct JointRange
{
    double min;
    double max;
};

/// Admissible interval per orientation dimension (yaw, pitch, roll, elbow).
inline constexpr JointRange kJointRanges[kJointDims] = { { 0.0, 90.0 }, { -90.0, 90.0 }, { -90.0, 0.0 }, { 0.0, 120.0 } };

inline constexpr const char* kJointNames[kJointDims] = { "sh_yaw", "sh_pitch", "sh_roll", "elbow" };

bool in_range( const JointOrientation& orient );

/// Throws OutOfRange naming the first offending angle.
void check_range( const JointOrientation& orient );

template <typename Scalar>
Eigen::Matrix<Scalar, 3, 1> forward_kinematics( const ArmModelT<Scalar>& model, const ChainAnglesT<Scalar>& a )
{
    using std::cos;
    using std::sin;
    const Scalar radial = model.l2 * cos( a.elevation ) + model.l3 * cos( a.elevation + a.elbow );
    const Scalar height = model.l2 * sin( a.elevation ) + model.l3 * sin( a.elevation + a.elbow );
    return { radial * cos( a.yaw ), radial * sin( a.yaw ), model.l1 + height };
}

/// Cosine of the elbow angle needed to reach `target`; |c3| > 1 means out of reach.
/// Targets on the envelope itself may land a few ulps outside [-1, 1].
template <typename Scalar>
Scalar elbow_cosine( const ArmModelT<Scalar>& model, const Eigen::Matrix<Scalar, 3, 1>& target )
{
    const Scalar x = target.x();
    const Scalar y = target.y();
    const Scalar h = target.z() - model.l1;
    return ( x * x + y * y + h * h - model.l2 * model.l2 - model.l3 * model.l3 ) / ( Scalar( 2 ) * model.l2 * model.l3 );
}

template <typename Scalar>
constexpr Scalar reach_slack()
{
    return Scalar( 64 ) * std::numeric_limits<Scalar>::epsilon();
}

template <typename Scalar>
bool reachable( const ArmModelT<Scalar>& model, const Eigen::Matrix<Scalar, 3, 1>& target )
{
    using std::abs;
    return abs( elbow_cosine( model, target ) ) <= Scalar( 1 ) + reach_slack<Scalar>();
}

/// Closed-form elbow-up inverse of `forward_kinematics`.
template <typename Scalar>
IkSolutionT<Scalar> inverse_kinematics( const ArmModelT<Scalar>& model, const Eigen::Matrix<Scalar, 3, 1>& target )
{
    using std::abs;
    using std::atan2;
    using std::sqrt;
    const Scalar raw = elbow_cosine( model, target );
    if( !( abs( raw ) <= Scalar( 1 ) + reach_slack<Scalar>() ) )
        throw Error( Errc::Unreachable, "target outside the reach envelope" );
    const Scalar c3 = std::clamp( raw, Scalar( -1 ), Scalar( 1 ) );
    const Scalar s3 = sqrt( Scalar( 1 ) - c3 * c3 );

    const Scalar x = target.x();
    const Scalar y = target.y();
    IkSolutionT<Scalar> out;
    out.singular = ( x == Scalar( 0 ) && y == Scalar( 0 ) );
    out.angles.yaw = out.singular ? Scalar( 0 ) : atan2( y, x );
    out.angles.elevation = atan2( target.z() - model.l1, sqrt( x * x + y * y ) ) -
                           atan2( model.l3 * s3, model.l2 + model.l3 * c3 );
    out.angles.elbow = atan2( s3, c3 );
    return out;
}

/// Hand position for a menu orientation. Yaw turns about the vertical through the
/// shoulder, pitch raises the upper arm, roll spins the upper arm about its own axis
/// (tilting the plane the elbow flexes in), and flexion bends the forearm upward
/// within that plane. With zero roll this is `forward_kinematics` in degrees.
template <typename Scalar>
Eigen::Matrix<Scalar, 3, 1> spawn_position( const ArmModelT<Scalar>& model, const JointOrientation& orient )
{
    check_range( orient );
    using Vec3 = Eigen::Matrix<Scalar, 3, 1>;
    using Angle = Eigen::AngleAxis<Scalar>;
    constexpr Scalar deg = Scalar( std::numbers::pi / 180.0 );
    const Eigen::Matrix<Scalar, 3, 3> shoulder_rot =
        ( Angle( Scalar( orient.sh_yaw ) * deg, Vec3::UnitZ() ) * Angle( -Scalar( orient.sh_pitch ) * deg, Vec3::UnitY() ) *
          Angle( Scalar( orient.sh_roll ) * deg, Vec3::UnitX() ) )
            .toRotationMatrix();
    const Scalar flex = Scalar( orient.elbow ) * deg;
    const Vec3 local( model.l2 + model.l3 * std::cos( flex ), Scalar( 0 ), model.l3 * std::sin( flex ) );
    return model.shoulder() + shoulder_rot * local;
}

using ArmModel = ArmModelT<double>;
using ChainAngles = ChainAnglesT<double>;
using IkSolution = IkSolutionT<double>;
using TargetPoint = Eigen::Vector3d;

} // namespace rehab
