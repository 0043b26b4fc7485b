#include "rehab/taskgen.hpp"

#include <cmath>
#include <limits>
#include <numeric>

namespace rehab
{

void UctConfig::validate() const
{
    if( !( cp >= 0.0 ) || !std::isfinite( cp ) )
        throw Error( Errc::InvalidArgument, "cp must be a non-negative finite constant" );
    if( iterations < 1 )
        throw Error( Errc::InvalidArgument, "iterations must be at least 1" );
    if( !( target_success > 0.0 && target_success < 1.0 ) )
        throw Error( Errc::InvalidArgument, "target_success must lie in (0, 1)" );
}

double uct_value( double mean_reward, double cp, std::int64_t parent_visits, std::int64_t child_visits )
{
    if( child_visits <= 0 )
        return std::numeric_limits<double>::infinity();
    return mean_reward + cp * std::sqrt( std::log( static_cast<double>( parent_visits ) ) / static_cast<double>( child_visits ) );
}

SearchTree::SearchTree( const ActionGrid& grid )
    : grid_( grid )
{
    grid_.validate();
    Node root;
    root.untried.resize( static_cast<std::size_t>( grid_.axes[0].samples ) );
    std::iota( root.untried.begin(), root.untried.end(), 0 );
    nodes_.push_back( std::move( root ) );
}

NodeId SearchTree::add_child( NodeId parent, int action )
{
    Node child;
    {
        const Node& p = node( parent );
        child.depth = p.depth + 1;
        child.prefix = p.prefix;
        child.prefix[static_cast<std::size_t>( p.depth )] = action;
    }
    child.action = action;
    child.parent = parent;
    if( child.depth < kLeafDepth )
    {
        child.untried.resize( static_cast<std::size_t>( grid_.axes[static_cast<std::size_t>( child.depth )].samples ) );
        std::iota( child.untried.begin(), child.untried.end(), 0 );
    }
    const auto id = static_cast<NodeId>( nodes_.size() );
    nodes_.push_back( std::move( child ) );
    node( parent ).children.push_back( id );
    return id;
}

NodeId select( const SearchTree& tree, NodeId node, const UctConfig& cfg, Rng& rng )
{
    const auto& parent = tree.node( node );
    if( parent.children.empty() )
        throw Error( Errc::InvalidArgument, "select on a node without children" );
    if( parent.children.size() == 1 )
        return parent.children.front();

    const double log_n = std::log( static_cast<double>( parent.visits ) );
    auto score = [&]( const SearchTree::Node& child ) {
        if( child.visits <= 0 )
            return std::numeric_limits<double>::infinity();
        return child.mean_reward + cfg.cp * std::sqrt( log_n / static_cast<double>( child.visits ) );
    };

    double best = -std::numeric_limits<double>::infinity();
    NodeId first_best = -1;
    int ties = 0;
    for( NodeId c : parent.children )
    {
        const double v = score( tree.node( c ) );
        if( v > best )
        {
            best = v;
            first_best = c;
            ties = 1;
        }
        else if( v == best )
            ++ties;
    }
    if( ties == 1 )
        return first_best;

    auto pick = static_cast<int>( rng.index( static_cast<std::uint64_t>( ties ) ) );
    for( NodeId c : parent.children )
    {
        if( score( tree.node( c ) ) == best && pick-- == 0 )
            return c;
    }
    return first_best;
}

std::optional<NodeId> expand( SearchTree& tree, NodeId node, Rng& rng )
{
    auto& untried = tree.node( node ).untried;
    if( untried.empty() )
        return std::nullopt;
    const auto k = static_cast<std::size_t>( rng.index( untried.size() ) );
    const int action = untried[k];
    untried[k] = untried.back();
    untried.pop_back();
    return tree.add_child( node, action );
}

RolloutResult rollout( const SearchTree& tree, NodeId node, const SuccessModel& model, const UctConfig& cfg, Rng& rng )
{
    const auto& n = tree.node( node );
    const ActionGrid& grid = tree.grid();
    RolloutResult r;
    r.cell = n.prefix;
    for( int d = n.depth; d < kJointDims; ++d )
        r.cell[static_cast<std::size_t>( d )] = static_cast<int>( rng.index( static_cast<std::uint64_t>( grid.axes[static_cast<std::size_t>( d )].samples ) ) );
    r.reward = target_reward( model( grid.at( r.cell ) ), cfg.target_success );
    return r;
}

RolloutResult rollout( const SearchTree& tree, NodeId node, const PatientProfile& patient, const UctConfig& cfg, Rng& rng )
{
    return rollout( tree, node, SuccessModel( [&patient]( const JointOrientation& o ) { return predict_success( patient, o ); } ), cfg, rng );
}

void backpropagate( SearchTree& tree, std::span<const NodeId> path, double reward )
{
    for( NodeId id : path )
    {
        auto& n = tree.node( id );
        ++n.visits;
        n.mean_reward += ( reward - n.mean_reward ) / static_cast<double>( n.visits );
    }
}

MctsResult mcts_search( const ActionGrid& grid, const SuccessModel& model, const UctConfig& cfg, Rng& rng )
{
    cfg.validate();
    SearchTree tree( grid );
    std::vector<NodeId> path;
    path.reserve( SearchTree::kLeafDepth + 1 );

    for( int it = 0; it < cfg.iterations; ++it )
    {
        path.clear();
        NodeId cur = SearchTree::root();
        path.push_back( cur );
        while( tree.node( cur ).depth < SearchTree::kLeafDepth && tree.node( cur ).untried.empty() )
        {
            cur = select( tree, cur, cfg, rng );
            path.push_back( cur );
        }
        if( auto child = expand( tree, cur, rng ) )
        {
            cur = *child;
            path.push_back( cur );
        }
        const RolloutResult r = rollout( tree, cur, model, cfg, rng );
        backpropagate( tree, path, r.reward );
        for( NodeId id : path )
        {
            auto& n = tree.node( id );
            if( r.reward > n.best_reward )
            {
                n.best_reward = r.reward;
                n.best_rollout = r.cell;
            }
        }
    }

    // Robust child: follow visit counts, then mean reward, then insertion order.
    NodeId cur = SearchTree::root();
    while( !tree.node( cur ).children.empty() )
    {
        NodeId best = -1;
        for( NodeId c : tree.node( cur ).children )
        {
            if( best < 0 )
            {
                best = c;
                continue;
            }
            const auto& a = tree.node( c );
            const auto& b = tree.node( best );
            if( a.visits > b.visits || ( a.visits == b.visits && a.mean_reward > b.mean_reward ) )
                best = c;
        }
        cur = best;
    }

    const auto& end = tree.node( cur );
    MctsResult out;
    out.path_depth = end.depth;
    out.orientation = grid.at( end.depth == SearchTree::kLeafDepth ? end.prefix : end.best_rollout );
    out.root_visits = tree.node( SearchTree::root() ).visits;
    out.tree_size = tree.size();
    return out;
}

JointOrientation mcts_generate( const ActionGrid& grid, const SuccessModel& model, const UctConfig& cfg, Rng& rng )
{
    return mcts_search( grid, model, cfg, rng ).orientation;
}

JointOrientation mcts_generate( const ActionGrid& grid, const PatientProfile& patient, const UctConfig& cfg, Rng& rng )
{
    return mcts_generate( grid, SuccessModel( [&patient]( const JointOrientation& o ) { return predict_success( patient, o ); } ), cfg, rng );
}

} // namespace rehab
