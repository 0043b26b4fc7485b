#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace rehab
{

/// Seeded generator with platform-independent draws: xoshiro256** seeded through
/// splitmix64, with its own uniform, integer and normal transforms.
class Rng
{
public:
    explicit Rng( std::uint64_t seed = 0 ) { reseed( seed ); }

    void reseed( std::uint64_t seed )
    {
        std::uint64_t x = seed;
        for( auto& s : state_ )
            s = splitmix( x );
        has_spare_ = false;
    }

    std::uint64_t next()
    {
        const std::uint64_t result = rotl( state_[1] * 5, 7 ) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl( state_[3], 45 );
        return result;
    }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>( next() >> 11 ) * 0x1.0p-53; }

    double uniform( double lo, double hi ) { return lo + ( hi - lo ) * uniform(); }

    /// Unbiased integer in [0, n); n must be > 0.
    std::uint64_t index( std::uint64_t n )
    {
        // Lemire's multiply-and-reject.
        unsigned __int128 m = static_cast<unsigned __int128>( next() ) * n;
        auto low = static_cast<std::uint64_t>( m );
        if( low < n )
        {
            const std::uint64_t threshold = ( 0 - n ) % n;
            while( low < threshold )
            {
                m = static_cast<unsigned __int128>( next() ) * n;
                low = static_cast<std::uint64_t>( m );
            }
        }
        return static_cast<std::uint64_t>( m >> 64 );
    }

    bool bernoulli( double p ) { return uniform() < p; }

    double normal()
    {
        if( has_spare_ )
        {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while( u1 <= 0.0 )
            u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt( -2.0 * std::log( u1 ) );
        const double a = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin( a );
        has_spare_ = true;
        return r * std::cos( a );
    }

    double normal( double mean, double sd ) { return mean + sd * normal(); }

    /// Independent stream derived from (seed, stream); used to fan out sessions.
    static Rng stream( std::uint64_t seed, std::uint64_t stream_id )
    {
        std::uint64_t x = seed ^ ( 0x9E3779B97F4A7C15ULL * ( stream_id + 1 ) );
        return Rng( splitmix( x ) );
    }

private:
    static std::uint64_t rotl( std::uint64_t x, int k ) { return ( x << k ) | ( x >> ( 64 - k ) ); }

    static std::uint64_t splitmix( std::uint64_t& x )
    {
        std::uint64_t z = ( x += 0x9E3779B97F4A7C15ULL );
        z = ( z ^ ( z >> 30 ) ) * 0xBF58476D1CE4E5B9ULL;
        z = ( z ^ ( z >> 27 ) ) * 0x94D049BB133111EBULL;
        return z ^ ( z >> 31 );
    }

    std::uint64_t state_[4]{};
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace rehab
