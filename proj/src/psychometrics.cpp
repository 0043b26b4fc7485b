#include "rehab/psychometrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <Eigen/Cholesky>

#include "rehab/error.hpp"

namespace rehab::rasch
{

namespace
{

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kMinVariance = 1e-12;

/// Category log-weights x * eta - (tau_1 + ... + tau_x) share one cumulative-threshold vector.
class Scale
{
public:
    explicit Scale( const Eigen::Ref<const Eigen::VectorXd>& tau )
        : cum_( tau.size() + 1 )
    {
        cum_[0] = 0.0;
        for( Eigen::Index k = 0; k < tau.size(); ++k )
            cum_[k + 1] = cum_[k] + tau[k];
    }

    int top() const { return static_cast<int>( cum_.size() ) - 1; }

    /// Fills `p` with P(X = 0..m) at eta.
    void probs( double eta, Eigen::Ref<Eigen::VectorXd> p ) const
    {
        const Eigen::Index n = cum_.size();
        double hi = -std::numeric_limits<double>::infinity();
        for( Eigen::Index x = 0; x < n; ++x )
        {
            p[x] = static_cast<double>( x ) * eta - cum_[x];
            hi = std::max( hi, p[x] );
        }
        double sum = 0.0;
        for( Eigen::Index x = 0; x < n; ++x )
        {
            p[x] = std::exp( p[x] - hi );
            sum += p[x];
        }
        p /= sum;
    }

    double log_prob( double eta, int x ) const
    {
        const Eigen::Index n = cum_.size();
        double hi = -std::numeric_limits<double>::infinity();
        for( Eigen::Index k = 0; k < n; ++k )
            hi = std::max( hi, static_cast<double>( k ) * eta - cum_[k] );
        double sum = 0.0;
        for( Eigen::Index k = 0; k < n; ++k )
            sum += std::exp( static_cast<double>( k ) * eta - cum_[k] - hi );
        return static_cast<double>( x ) * eta - cum_[x] - hi - std::log( sum );
    }

    struct Moments
    {
        double mean;
        double variance;
    };

    Moments moments( double eta, Eigen::Ref<Eigen::VectorXd> scratch ) const
    {
        probs( eta, scratch );
        double e = 0.0, e2 = 0.0;
        for( Eigen::Index x = 0; x < scratch.size(); ++x )
        {
            e += static_cast<double>( x ) * scratch[x];
            e2 += static_cast<double>( x * x ) * scratch[x];
        }
        return { e, std::max( e2 - e * e, 0.0 ) };
    }

private:
    Eigen::VectorXd cum_;
};

std::vector<std::string> default_labels( Eigen::Index items )
{
    std::vector<std::string> labels;
    for( Eigen::Index i = 0; i < items; ++i )
        labels.push_back( "item_" + std::to_string( i + 1 ) );
    return labels;
}

struct ActiveSets
{
    std::vector<Extreme> person;
    std::vector<Extreme> item;
};

/// Repeatedly drops persons and items whose raw score over the remaining cells is the
/// minimum or maximum possible.
ActiveSets find_extremes( const ResponseMatrix& m )
{
    const Eigen::Index V = m.persons();
    const Eigen::Index I = m.items();
    const int top = m.max_category();
    ActiveSets s{ std::vector<Extreme>( static_cast<std::size_t>( V ), Extreme::None ),
                  std::vector<Extreme>( static_cast<std::size_t>( I ), Extreme::None ) };

    auto classify = []( long raw, long n, int top_cat ) {
        if( n == 0 || raw == 0 )
            return Extreme::Minimum;
        if( raw == n * top_cat )
            return Extreme::Maximum;
        return Extreme::None;
    };

    bool changed = true;
    while( changed )
    {
        changed = false;
        for( Eigen::Index v = 0; v < V; ++v )
        {
            if( s.person[static_cast<std::size_t>( v )] != Extreme::None )
                continue;
            long raw = 0, n = 0;
            for( Eigen::Index i = 0; i < I; ++i )
                if( s.item[static_cast<std::size_t>( i )] == Extreme::None && m.present( v, i ) )
                {
                    raw += m.data( v, i );
                    ++n;
                }
            if( const auto e = classify( raw, n, top ); e != Extreme::None )
            {
                s.person[static_cast<std::size_t>( v )] = e;
                changed = true;
            }
        }
        for( Eigen::Index i = 0; i < I; ++i )
        {
            if( s.item[static_cast<std::size_t>( i )] != Extreme::None )
                continue;
            long raw = 0, n = 0;
            for( Eigen::Index v = 0; v < V; ++v )
                if( s.person[static_cast<std::size_t>( v )] == Extreme::None && m.present( v, i ) )
                {
                    raw += m.data( v, i );
                    ++n;
                }
            if( const auto e = classify( raw, n, top ); e != Extreme::None )
            {
                s.item[static_cast<std::size_t>( i )] = e;
                changed = true;
            }
        }
    }
    return s;
}

bool active( const std::vector<Extreme>& flags, Eigen::Index k ) { return flags[static_cast<std::size_t>( k )] == Extreme::None; }

class JmleSolver
{
public:
    JmleSolver( const ResponseMatrix& m, const ActiveSets& sets, const JmleOptions& opts )
        : m_( m ), sets_( sets ), opts_( opts ), scratch_( m.categories )
    {}

    RaschEstimate run()
    {
        initialise();
        RaschEstimate est;
        double ll = total_ll();
        for( int sweep = 1; sweep <= opts_.max_iter; ++sweep )
        {
            double change = 0.0;
            change = std::max( change, update_persons() );
            change = std::max( change, update_items() );
            center();
            change = std::max( change, update_thresholds( ll ) );
            ll = total_ll();
            est.log_likelihood.push_back( ll );
            est.iterations_used = sweep;
            if( change < opts_.tol )
            {
                est.converged = true;
                break;
            }
        }
        finish( est );
        return est;
    }

private:
    void initialise()
    {
        const Eigen::Index V = m_.persons();
        const Eigen::Index I = m_.items();
        const int top = m_.max_category();
        theta_ = Eigen::VectorXd::Zero( V );
        delta_ = Eigen::VectorXd::Zero( I );
        tau_ = Eigen::VectorXd::Zero( top );

        Eigen::VectorXd counts = Eigen::VectorXd::Zero( m_.categories );
        for( Eigen::Index v = 0; v < V; ++v )
        {
            if( !active( sets_.person, v ) )
                continue;
            double raw = 0.0, n = 0.0;
            for( Eigen::Index i = 0; i < I; ++i )
                if( active( sets_.item, i ) && m_.present( v, i ) )
                {
                    raw += m_.data( v, i );
                    n += 1.0;
                    counts[m_.data( v, i )] += 1.0;
                }
            theta_[v] = std::log( ( raw + 0.5 ) / ( n * top - raw + 0.5 ) );
        }
        for( Eigen::Index i = 0; i < I; ++i )
        {
            if( !active( sets_.item, i ) )
                continue;
            double raw = 0.0, n = 0.0;
            for( Eigen::Index v = 0; v < V; ++v )
                if( active( sets_.person, v ) && m_.present( v, i ) )
                {
                    raw += m_.data( v, i );
                    n += 1.0;
                }
            delta_[i] = -std::log( ( raw + 0.5 ) / ( n * top - raw + 0.5 ) );
        }
        for( int k = 1; k <= top; ++k )
            tau_[k - 1] = std::log( ( counts[k - 1] + 0.5 ) / ( counts[k] + 0.5 ) );
        if( top > 0 )
            tau_.array() -= tau_.mean();
        center();
    }

    double person_ll( Eigen::Index v, double theta, const Scale& scale ) const
    {
        double ll = 0.0;
        for( Eigen::Index i = 0; i < m_.items(); ++i )
            if( active( sets_.item, i ) && m_.present( v, i ) )
                ll += scale.log_prob( theta - delta_[i], m_.data( v, i ) );
        return ll;
    }

    double item_ll( Eigen::Index i, double delta, const Scale& scale ) const
    {
        double ll = 0.0;
        for( Eigen::Index v = 0; v < m_.persons(); ++v )
            if( active( sets_.person, v ) && m_.present( v, i ) )
                ll += scale.log_prob( theta_[v] - delta, m_.data( v, i ) );
        return ll;
    }

    double total_ll( const Eigen::VectorXd& tau ) const
    {
        const Scale scale( tau );
        double ll = 0.0;
        for( Eigen::Index v = 0; v < m_.persons(); ++v )
            if( active( sets_.person, v ) )
                ll += person_ll( v, theta_[v], scale );
        return ll;
    }

    double total_ll() const { return total_ll( tau_ ); }

    /// One clamped Newton step on a scalar parameter, halved until `ll` does not decrease.
    template <typename LogLik>
    double safeguarded_step( double& param, double step, const LogLik& ll )
    {
        step = std::clamp( step, -opts_.max_step, opts_.max_step );
        const double before = ll( param );
        for( int halving = 0; halving < 30; ++halving )
        {
            if( ll( param + step ) >= before )
            {
                param += step;
                return std::abs( step );
            }
            step *= 0.5;
        }
        return 0.0;
    }

    double update_persons()
    {
        const Scale scale( tau_ );
        double change = 0.0;
        for( Eigen::Index v = 0; v < m_.persons(); ++v )
        {
            if( !active( sets_.person, v ) )
                continue;
            double resid = 0.0, info = 0.0;
            for( Eigen::Index i = 0; i < m_.items(); ++i )
                if( active( sets_.item, i ) && m_.present( v, i ) )
                {
                    const auto mo = scale.moments( theta_[v] - delta_[i], scratch_ );
                    resid += m_.data( v, i ) - mo.mean;
                    info += mo.variance;
                }
            if( info <= 0.0 )
                continue;
            change = std::max( change, safeguarded_step( theta_[v], resid / info,
                                                         [&]( double t ) { return person_ll( v, t, scale ); } ) );
        }
        return change;
    }

    double update_items()
    {
        const Scale scale( tau_ );
        double change = 0.0;
        for( Eigen::Index i = 0; i < m_.items(); ++i )
        {
            if( !active( sets_.item, i ) )
                continue;
            double resid = 0.0, info = 0.0;
            for( Eigen::Index v = 0; v < m_.persons(); ++v )
                if( active( sets_.person, v ) && m_.present( v, i ) )
                {
                    const auto mo = scale.moments( theta_[v] - delta_[i], scratch_ );
                    resid += m_.data( v, i ) - mo.mean;
                    info += mo.variance;
                }
            if( info <= 0.0 )
                continue;
            change = std::max( change, safeguarded_step( delta_[i], -resid / info,
                                                         [&]( double d ) { return item_ll( i, d, scale ); } ) );
        }
        return change;
    }

    /// Shifts item difficulties to mean zero; abilities move with them so the likelihood
    /// is unchanged.
    void center()
    {
        double sum = 0.0;
        int n = 0;
        for( Eigen::Index i = 0; i < m_.items(); ++i )
            if( active( sets_.item, i ) )
            {
                sum += delta_[i];
                ++n;
            }
        if( n == 0 )
            return;
        const double shift = sum / n;
        for( Eigen::Index i = 0; i < m_.items(); ++i )
            if( active( sets_.item, i ) )
                delta_[i] -= shift;
        for( Eigen::Index v = 0; v < m_.persons(); ++v )
            if( active( sets_.person, v ) )
                theta_[v] -= shift;
    }

    /// Newton step for tau restricted to sum(tau) = 0, i.e. tau = B * eta with
    /// B = [I; -1]. Gradient: sum over cells of P(X >= k) - [x >= k]; information:
    /// covariance of the indicators [X >= k].
    double update_thresholds( double current_ll )
    {
        const int top = m_.max_category();
        if( top < 2 )
            return 0.0;
        const Scale scale( tau_ );
        Eigen::VectorXd grad = Eigen::VectorXd::Zero( top );
        Eigen::MatrixXd info = Eigen::MatrixXd::Zero( top, top );
        Eigen::VectorXd tail( top );
        for( Eigen::Index v = 0; v < m_.persons(); ++v )
        {
            if( !active( sets_.person, v ) )
                continue;
            for( Eigen::Index i = 0; i < m_.items(); ++i )
            {
                if( !active( sets_.item, i ) || !m_.present( v, i ) )
                    continue;
                scale.probs( theta_[v] - delta_[i], scratch_ );
                double acc = 0.0;
                for( int k = top; k >= 1; --k )
                {
                    acc += scratch_[k];
                    tail[k - 1] = acc;
                }
                const int x = m_.data( v, i );
                for( int k = 1; k <= top; ++k )
                {
                    grad[k - 1] += tail[k - 1] - ( x >= k ? 1.0 : 0.0 );
                    for( int l = 1; l <= top; ++l )
                        info( k - 1, l - 1 ) += tail[std::max( k, l ) - 1] - tail[k - 1] * tail[l - 1];
                }
            }
        }

        Eigen::MatrixXd basis = Eigen::MatrixXd::Zero( top, top - 1 );
        basis.topRows( top - 1 ).setIdentity();
        basis.row( top - 1 ).setConstant( -1.0 );
        const Eigen::MatrixXd reduced_info = basis.transpose() * info * basis;
        const Eigen::LDLT<Eigen::MatrixXd> ldlt( reduced_info );
        if( ldlt.info() != Eigen::Success || !ldlt.isPositive() )
            return 0.0;
        Eigen::VectorXd step = basis * ldlt.solve( basis.transpose() * grad );
        const double biggest = step.cwiseAbs().maxCoeff();
        if( !std::isfinite( biggest ) )
            return 0.0;
        if( biggest > opts_.max_step )
            step *= opts_.max_step / biggest;

        for( int halving = 0; halving < 30; ++halving )
        {
            const Eigen::VectorXd trial = tau_ + step;
            if( total_ll( trial ) >= current_ll )
            {
                tau_ = trial;
                tau_.array() -= tau_.mean();
                return step.cwiseAbs().maxCoeff();
            }
            step *= 0.5;
        }
        return 0.0;
    }

    void finish( RaschEstimate& est ) const
    {
        const Eigen::Index V = m_.persons();
        const Eigen::Index I = m_.items();
        const Scale scale( tau_ );
        est.person_ability = theta_;
        est.item_difficulty = delta_;
        est.thresholds = tau_;
        est.person_se = Eigen::VectorXd::Constant( V, kNaN );
        est.item_se = Eigen::VectorXd::Constant( I, kNaN );
        est.person_extreme = sets_.person;
        est.item_extreme = sets_.item;

        Eigen::VectorXd scratch( m_.categories );
        Eigen::VectorXd item_info = Eigen::VectorXd::Zero( I );
        double theta_lo = std::numeric_limits<double>::infinity(), theta_hi = -theta_lo;
        for( Eigen::Index v = 0; v < V; ++v )
        {
            if( !active( sets_.person, v ) )
                continue;
            theta_lo = std::min( theta_lo, theta_[v] );
            theta_hi = std::max( theta_hi, theta_[v] );
            double info = 0.0;
            for( Eigen::Index i = 0; i < I; ++i )
                if( active( sets_.item, i ) && m_.present( v, i ) )
                {
                    const double w = scale.moments( theta_[v] - delta_[i], scratch ).variance;
                    info += w;
                    item_info[i] += w;
                }
            est.person_se[v] = 1.0 / std::sqrt( info );
        }
        double delta_lo = std::numeric_limits<double>::infinity(), delta_hi = -delta_lo;
        for( Eigen::Index i = 0; i < I; ++i )
        {
            if( !active( sets_.item, i ) )
                continue;
            delta_lo = std::min( delta_lo, delta_[i] );
            delta_hi = std::max( delta_hi, delta_[i] );
            est.item_se[i] = 1.0 / std::sqrt( item_info[i] );
        }

        // Extreme scores sit one logit past the interior range.
        for( Eigen::Index v = 0; v < V; ++v )
        {
            const auto e = sets_.person[static_cast<std::size_t>( v )];
            if( e == Extreme::Maximum )
                est.person_ability[v] = theta_hi + 1.0;
            else if( e == Extreme::Minimum )
                est.person_ability[v] = theta_lo - 1.0;
        }
        for( Eigen::Index i = 0; i < I; ++i )
        {
            const auto e = sets_.item[static_cast<std::size_t>( i )];
            if( e == Extreme::Maximum )
                est.item_difficulty[i] = delta_lo - 1.0;
            else if( e == Extreme::Minimum )
                est.item_difficulty[i] = delta_hi + 1.0;
        }
    }

    const ResponseMatrix& m_;
    const ActiveSets& sets_;
    JmleOptions opts_;
    mutable Eigen::VectorXd scratch_;
    Eigen::VectorXd theta_;
    Eigen::VectorXd delta_;
    Eigen::VectorXd tau_;
};

} // namespace

void ResponseMatrix::validate() const
{
    if( categories < 2 )
        throw Error( Errc::InvalidArgument, "a rating scale needs at least two categories" );
    if( !item_labels.empty() && static_cast<Eigen::Index>( item_labels.size() ) != items() )
        throw Error( Errc::InvalidArgument, "item label count does not match the matrix" );
    for( Eigen::Index v = 0; v < persons(); ++v )
        for( Eigen::Index i = 0; i < items(); ++i )
        {
            const int x = data( v, i );
            if( x != kMissing && ( x < 0 || x > max_category() ) )
                throw Error( Errc::InvalidArgument, "response " + std::to_string( x ) + " at person " + std::to_string( v + 1 ) +
                                                        ", item " + std::to_string( i + 1 ) + " outside the scale" );
        }
}

ResponseMatrix read_responses_csv( std::istream& in, int categories )
{
    auto split = []( const std::string& line ) {
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ss( line );
        while( std::getline( ss, cell, ',' ) )
            cells.push_back( cell );
        if( !line.empty() && line.back() == ',' )
            cells.emplace_back();
        for( auto& c : cells )
        {
            const auto b = c.find_first_not_of( " \t\r" );
            const auto e = c.find_last_not_of( " \t\r" );
            c = b == std::string::npos ? std::string() : c.substr( b, e - b + 1 );
        }
        return cells;
    };

    std::string line;
    if( !std::getline( in, line ) )
        throw Error( Errc::InvalidArgument, "response CSV is empty" );
    ResponseMatrix m;
    m.categories = categories;
    m.item_labels = split( line );
    if( m.item_labels.empty() )
        throw Error( Errc::InvalidArgument, "response CSV header has no items" );

    std::vector<std::vector<int>> rows;
    std::size_t lineno = 1;
    while( std::getline( in, line ) )
    {
        ++lineno;
        if( line.find_first_not_of( " \t\r" ) == std::string::npos )
            continue;
        const auto cells = split( line );
        if( cells.size() != m.item_labels.size() )
            throw Error( Errc::InvalidArgument, "line " + std::to_string( lineno ) + ": expected " +
                                                    std::to_string( m.item_labels.size() ) + " cells" );
        std::vector<int> row;
        for( const auto& c : cells )
        {
            if( c.empty() )
            {
                row.push_back( ResponseMatrix::kMissing );
                continue;
            }
            std::size_t used = 0;
            int x = 0;
            try
            {
                x = std::stoi( c, &used );
            }
            catch( const std::exception& )
            {
                used = 0;
            }
            if( used != c.size() || x < 0 || x >= categories )
                throw Error( Errc::InvalidArgument, "line " + std::to_string( lineno ) + ": invalid response '" + c + "'" );
            row.push_back( x );
        }
        rows.push_back( std::move( row ) );
    }

    m.data.resize( static_cast<Eigen::Index>( rows.size() ), static_cast<Eigen::Index>( m.item_labels.size() ) );
    for( std::size_t v = 0; v < rows.size(); ++v )
        for( std::size_t i = 0; i < rows[v].size(); ++i )
            m.data( static_cast<Eigen::Index>( v ), static_cast<Eigen::Index>( i ) ) = rows[v][i];
    return m;
}

ResponseMatrix read_responses_csv( const std::filesystem::path& path, int categories )
{
    std::ifstream in( path );
    if( !in )
        throw Error( Errc::Io, "cannot open " + path.string() );
    return read_responses_csv( in, categories );
}

void write_responses_csv( std::ostream& out, const ResponseMatrix& m )
{
    const auto labels = m.item_labels.empty() ? default_labels( m.items() ) : m.item_labels;
    for( std::size_t i = 0; i < labels.size(); ++i )
        out << ( i ? "," : "" ) << labels[i];
    out << '\n';
    for( Eigen::Index v = 0; v < m.persons(); ++v )
    {
        for( Eigen::Index i = 0; i < m.items(); ++i )
        {
            if( i )
                out << ',';
            if( m.present( v, i ) )
                out << m.data( v, i );
        }
        out << '\n';
    }
}

RaschEstimate RaschEstimate::from_parameters( Eigen::VectorXd theta, Eigen::VectorXd delta, Eigen::VectorXd tau )
{
    RaschEstimate est;
    est.person_extreme.assign( static_cast<std::size_t>( theta.size() ), Extreme::None );
    est.item_extreme.assign( static_cast<std::size_t>( delta.size() ), Extreme::None );
    est.person_se = Eigen::VectorXd::Constant( theta.size(), kNaN );
    est.item_se = Eigen::VectorXd::Constant( delta.size(), kNaN );
    est.person_ability = std::move( theta );
    est.item_difficulty = std::move( delta );
    est.thresholds = std::move( tau );
    est.converged = true;
    return est;
}

Eigen::VectorXd rsm_category_prob( double theta, double delta, const Eigen::Ref<const Eigen::VectorXd>& thresholds )
{
    Eigen::VectorXd p( thresholds.size() + 1 );
    Scale( thresholds ).probs( theta - delta, p );
    return p;
}

double expected_score( double eta, const Eigen::Ref<const Eigen::VectorXd>& thresholds )
{
    Eigen::VectorXd p( thresholds.size() + 1 );
    return Scale( thresholds ).moments( eta, p ).mean;
}

double log_likelihood( const ResponseMatrix& m, const RaschEstimate& est )
{
    const Scale scale( est.thresholds );
    double ll = 0.0;
    for( Eigen::Index v = 0; v < m.persons(); ++v )
    {
        if( !active( est.person_extreme, v ) )
            continue;
        for( Eigen::Index i = 0; i < m.items(); ++i )
            if( active( est.item_extreme, i ) && m.present( v, i ) )
                ll += scale.log_prob( est.person_ability[v] - est.item_difficulty[i], m.data( v, i ) );
    }
    return ll;
}

RaschEstimate fit_jmle( const ResponseMatrix& m, const JmleOptions& opts )
{
    m.validate();
    if( !( opts.tol > 0.0 ) || opts.max_iter < 1 || !( opts.max_step > 0.0 ) )
        throw Error( Errc::InvalidArgument, "invalid JMLE options" );
    const ActiveSets sets = find_extremes( m );
    const bool any_person = std::any_of( sets.person.begin(), sets.person.end(), []( Extreme e ) { return e == Extreme::None; } );
    const bool any_item = std::any_of( sets.item.begin(), sets.item.end(), []( Extreme e ) { return e == Extreme::None; } );
    if( !any_person || !any_item )
        throw Error( Errc::DegenerateData, "no person or item has a non-extreme response pattern" );
    return JmleSolver( m, sets, opts ).run();
}

FitReport fit_statistics( const ResponseMatrix& m, const RaschEstimate& est )
{
    const Eigen::Index V = m.persons();
    const Eigen::Index I = m.items();
    if( est.person_ability.size() != V || est.item_difficulty.size() != I || est.thresholds.size() != m.max_category() )
        throw Error( Errc::InvalidArgument, "estimate does not match the response matrix" );

    struct Acc
    {
        double y2 = 0.0, w = 0.0, z2 = 0.0, y2_all = 0.0;
        int n_msq = 0, n_all = 0;
    };
    std::vector<Acc> item_acc( static_cast<std::size_t>( I ) ), person_acc( static_cast<std::size_t>( V ) );

    const Scale scale( est.thresholds );
    Eigen::VectorXd scratch( m.categories );
    FitReport report;
    for( Eigen::Index v = 0; v < V; ++v )
    {
        if( !active( est.person_extreme, v ) )
            continue;
        for( Eigen::Index i = 0; i < I; ++i )
        {
            if( !active( est.item_extreme, i ) || !m.present( v, i ) )
                continue;
            const auto mo = scale.moments( est.person_ability[v] - est.item_difficulty[i], scratch );
            const double y = m.data( v, i ) - mo.mean;
            for( Acc* a : { &item_acc[static_cast<std::size_t>( i )], &person_acc[static_cast<std::size_t>( v )] } )
            {
                a->y2_all += y * y;
                ++a->n_all;
            }
            if( mo.variance < kMinVariance )
            {
                ++report.zero_variance_cells;
                continue;
            }
            for( Acc* a : { &item_acc[static_cast<std::size_t>( i )], &person_acc[static_cast<std::size_t>( v )] } )
            {
                a->y2 += y * y;
                a->w += mo.variance;
                a->z2 += y * y / mo.variance;
                ++a->n_msq;
            }
        }
    }

    auto finish = []( const Acc& a ) {
        ItemFit f;
        f.count = a.n_all;
        f.infit_msq = a.w > 0.0 ? a.y2 / a.w : 0.0;
        f.outfit_msq = a.n_msq > 0 ? a.z2 / a.n_msq : 0.0;
        f.rmsr = a.n_all > 0 ? std::sqrt( a.y2_all / a.n_all ) : 0.0;
        return f;
    };
    for( const auto& a : item_acc )
        report.items.push_back( finish( a ) );
    for( const auto& a : person_acc )
        report.persons.push_back( finish( a ) );
    return report;
}

double separation_reliability( const Eigen::Ref<const Eigen::VectorXd>& measures, const Eigen::Ref<const Eigen::VectorXd>& se )
{
    if( measures.size() == 0 )
        return 0.0;
    const double mean = measures.mean();
    const double observed = ( measures.array() - mean ).square().mean();
    if( !( observed > 0.0 ) )
        return 0.0;
    const double error = se.array().square().mean();
    return std::clamp( ( observed - error ) / observed, 0.0, 1.0 );
}

double separation_ratio( double reliability )
{
    if( reliability <= 0.0 )
        return 0.0;
    if( reliability >= 1.0 )
        return std::numeric_limits<double>::infinity();
    return std::sqrt( reliability / ( 1.0 - reliability ) );
}

ReliabilityReport reliability( const ResponseMatrix& m, const RaschEstimate& est )
{
    (void)m;
    auto gather = []( const Eigen::VectorXd& measure, const Eigen::VectorXd& se, const std::vector<Extreme>& flags ) {
        std::vector<double> mv, sv;
        for( Eigen::Index k = 0; k < measure.size(); ++k )
            if( flags[static_cast<std::size_t>( k )] == Extreme::None && std::isfinite( se[k] ) )
            {
                mv.push_back( measure[k] );
                sv.push_back( se[k] );
            }
        const auto n = static_cast<Eigen::Index>( mv.size() );
        return separation_reliability( Eigen::Map<const Eigen::VectorXd>( mv.data(), n ), Eigen::Map<const Eigen::VectorXd>( sv.data(), n ) );
    };
    ReliabilityReport r;
    r.person_separation_reliability = gather( est.person_ability, est.person_se, est.person_extreme );
    r.item_separation_reliability = gather( est.item_difficulty, est.item_se, est.item_extreme );
    r.person_separation_ratio = separation_ratio( r.person_separation_reliability );
    r.item_separation_ratio = separation_ratio( r.item_separation_reliability );
    return r;
}

WrightMap wright_map( const RaschEstimate& est, const std::vector<std::string>& item_labels, double bin_width )
{
    if( !( bin_width > 0.0 ) )
        throw Error( Errc::InvalidArgument, "bin width must be positive" );
    const Eigen::Index I = est.item_difficulty.size();
    const auto labels = item_labels.empty() ? default_labels( I ) : item_labels;
    if( static_cast<Eigen::Index>( labels.size() ) != I )
        throw Error( Errc::InvalidArgument, "item label count does not match the estimate" );

    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for( double x : est.person_ability )
    {
        lo = std::min( lo, x );
        hi = std::max( hi, x );
    }
    for( double x : est.item_difficulty )
    {
        lo = std::min( lo, x );
        hi = std::max( hi, x );
    }
    if( !std::isfinite( lo ) )
        lo = hi = 0.0;

    WrightMap map;
    map.bin_width = bin_width;
    map.axis_min = std::floor( lo / bin_width ) * bin_width;
    auto bins = static_cast<int>( std::floor( ( hi - map.axis_min ) / bin_width ) ) + 1;
    map.axis_max = map.axis_min + bins * bin_width;
    for( int b = 0; b < bins; ++b )
        map.person_bins.push_back( { map.axis_min + b * bin_width, map.axis_min + ( b + 1 ) * bin_width, 0 } );
    for( double x : est.person_ability )
    {
        const int b = std::clamp( static_cast<int>( std::floor( ( x - map.axis_min ) / bin_width ) ), 0, bins - 1 );
        ++map.person_bins[static_cast<std::size_t>( b )].persons;
    }
    for( Eigen::Index i = 0; i < I; ++i )
        map.items.push_back( { labels[static_cast<std::size_t>( i )], est.item_difficulty[i] } );
    return map;
}

void write_wright_map_csv( std::ostream& out, const WrightMap& map )
{
    std::ostringstream buf;
    buf.precision( 17 );
    buf << "kind,label,lower,upper,count\n";
    buf << "axis,," << map.axis_min << ',' << map.axis_max << ',' << map.bin_width << '\n';
    for( const auto& b : map.person_bins )
        buf << "person_bin,," << b.lower << ',' << b.upper << ',' << b.persons << '\n';
    for( const auto& it : map.items )
        buf << "item," << it.label << ',' << it.logit << ',' << it.logit << ",1\n";
    out << buf.str();
}

WrightMap read_wright_map_csv( std::istream& in )
{
    std::string line;
    if( !std::getline( in, line ) || line != "kind,label,lower,upper,count" )
        throw Error( Errc::InvalidArgument, "not a Wright map CSV" );
    WrightMap map;
    std::size_t lineno = 1;
    while( std::getline( in, line ) )
    {
        ++lineno;
        if( line.empty() )
            continue;
        std::vector<std::string> f;
        std::string cell;
        std::istringstream ss( line );
        while( std::getline( ss, cell, ',' ) )
            f.push_back( cell );
        if( f.size() != 5 )
            throw Error( Errc::InvalidArgument, "Wright map line " + std::to_string( lineno ) + ": expected 5 fields" );
        if( f[0] == "axis" )
        {
            map.axis_min = std::stod( f[2] );
            map.axis_max = std::stod( f[3] );
            map.bin_width = std::stod( f[4] );
        }
        else if( f[0] == "person_bin" )
            map.person_bins.push_back( { std::stod( f[2] ), std::stod( f[3] ), std::stoi( f[4] ) } );
        else if( f[0] == "item" )
            map.items.push_back( { f[1], std::stod( f[2] ) } );
        else
            throw Error( Errc::InvalidArgument, "Wright map line " + std::to_string( lineno ) + ": unknown kind '" + f[0] + "'" );
    }
    return map;
}

CategoryCurves category_curves( const Eigen::Ref<const Eigen::VectorXd>& thresholds, double lo, double hi, int points )
{
    if( points < 2 || !( lo < hi ) )
        throw Error( Errc::InvalidArgument, "category curves need lo < hi and at least two points" );
    const auto top = static_cast<int>( thresholds.size() );
    const Scale scale( thresholds );

    CategoryCurves c;
    c.location = Eigen::VectorXd::LinSpaced( points, lo, hi );
    c.probability.resize( points, top + 1 );
    Eigen::VectorXd p( top + 1 );
    for( int r = 0; r < points; ++r )
    {
        scale.probs( c.location[r], p );
        c.probability.row( r ) = p.transpose();
    }

    // Adjacent curves cross where P(k) / P(k-1) = exp(eta - tau_k) = 1.
    c.crossovers = thresholds;

    // Category k dominates every j on the interval bounded below by the largest
    // (T_k - T_j) / (k - j) over j < k and above by the smallest over j > k, with T the
    // cumulative threshold sum.
    Eigen::VectorXd cum( top + 1 );
    cum[0] = 0.0;
    for( int k = 1; k <= top; ++k )
        cum[k] = cum[k - 1] + thresholds[k - 1];
    for( int k = 0; k <= top; ++k )
    {
        double lower = -std::numeric_limits<double>::infinity();
        double upper = std::numeric_limits<double>::infinity();
        for( int j = 0; j < k; ++j )
            lower = std::max( lower, ( cum[k] - cum[j] ) / ( k - j ) );
        for( int j = k + 1; j <= top; ++j )
            upper = std::min( upper, ( cum[j] - cum[k] ) / ( j - k ) );
        if( !( lower < upper ) )
            c.never_modal.push_back( k );
    }

    // Peaks: interior curves are maximal where E[X] = k, found by bisection.
    c.peaks.resize( top + 1 );
    c.peaks[0] = lo;
    c.peaks[top] = hi;
    for( int k = 1; k < top; ++k )
    {
        double a = -60.0, b = 60.0;
        for( int it = 0; it < 200; ++it )
        {
            const double mid = 0.5 * ( a + b );
            ( scale.moments( mid, p ).mean < k ? a : b ) = mid;
        }
        c.peaks[k] = 0.5 * ( a + b );
    }
    for( int k = 1; k <= top; ++k )
        if( !( c.peaks[k] > c.peaks[k - 1] ) )
            c.peaks_ascending = false;
    return c;
}

CategoryCurves category_curves( const RaschEstimate& est, double lo, double hi, int points )
{
    return category_curves( est.thresholds, lo, hi, points );
}

ResponseMatrix simulate_responses( const Eigen::Ref<const Eigen::VectorXd>& theta, const Eigen::Ref<const Eigen::VectorXd>& delta,
                                   const Eigen::Ref<const Eigen::VectorXd>& tau, Rng& rng )
{
    ResponseMatrix m;
    m.categories = static_cast<int>( tau.size() ) + 1;
    m.data.resize( theta.size(), delta.size() );
    m.item_labels = default_labels( delta.size() );
    const Scale scale( tau );
    Eigen::VectorXd p( m.categories );
    for( Eigen::Index v = 0; v < theta.size(); ++v )
        for( Eigen::Index i = 0; i < delta.size(); ++i )
        {
            scale.probs( theta[v] - delta[i], p );
            double u = rng.uniform();
            int x = 0;
            while( x < m.max_category() && u >= p[x] )
                u -= p[x++];
            m.data( v, i ) = x;
        }
    return m;
}

const char* to_string( Construct c )
{
    switch( c )
    {
    case Construct::Flow: return "flow";
    case Construct::Presence: return "presence";
    case Construct::Absorption: return "absorption";
    }
    return "flow";
}

Construct engagement_construct( int number )
{
    switch( number )
    {
    case 3:
    case 6:
    case 8:
    case 9:
    case 16: return Construct::Flow;
    case 5:
    case 12:
    case 13:
    case 14:
    case 15: return Construct::Presence;
    case 1:
    case 2:
    case 4:
    case 7:
    case 10:
    case 11: return Construct::Absorption;
    default: throw Error( Errc::OutOfRange, "engagement questionnaire items are numbered 1..16" );
    }
}

} // namespace rehab::rasch
