#pragma once

#include <cstdint>
#include <functional>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include "rehab/grid.hpp"
#include "rehab/patient.hpp"
#include "rehab/rng.hpp"

namespace rehab
{

struct UctConfig
{
    double cp = 1.0 / std::numbers::sqrt2;
    int iterations = 1000;
    std::uint64_t seed = 0;
    double target_success = 0.9;

    void validate() const;
};

/// Success probability the generator plans against.
using SuccessModel = std::function<double( const JointOrientation& )>;

/// UCT score X_j + cp * sqrt(ln n / n_j). An unvisited child scores +infinity.
double uct_value( double mean_reward, double cp, std::int64_t parent_visits, std::int64_t child_visits );

/// Reward of a candidate orientation: 1 - |p_success - target|.
inline double target_reward( double p_success, double target_success ) { return 1.0 - std::abs( p_success - target_success ); }

using NodeId = int;

/// Search tree over the action grid. Ply d assigns grid axis d (yaw, pitch, roll, elbow),
/// so depth-4 nodes are complete orientations.
class SearchTree
{
public:
    static constexpr int kLeafDepth = kJointDims;

    struct Node
    {
        int depth = 0;
        int action = -1; ///< grid index chosen at this ply; -1 at the root
        NodeId parent = -1;
        double mean_reward = 0.0;
        std::int64_t visits = 0;
        GridIndex prefix{}; ///< indices of the assigned plies [0, depth)
        std::vector<NodeId> children;
        std::vector<int> untried;
        double best_reward = -1.0;
        GridIndex best_rollout{};
    };

    explicit SearchTree( const ActionGrid& grid );

    static constexpr NodeId root() { return 0; }
    const Node& node( NodeId id ) const { return nodes_[static_cast<std::size_t>( id )]; }
    Node& node( NodeId id ) { return nodes_[static_cast<std::size_t>( id )]; }
    std::size_t size() const { return nodes_.size(); }
    const ActionGrid& grid() const { return grid_; }

    NodeId add_child( NodeId parent, int action );

private:
    ActionGrid grid_;
    std::vector<Node> nodes_;
};

/// Child maximizing UCT; exact ties are broken uniformly at random.
NodeId select( const SearchTree& tree, NodeId node, const UctConfig& cfg, Rng& rng );

/// Adds one child for a random untried action of the next ply. Returns nullopt when the
/// node is a leaf or every action already has a child.
std::optional<NodeId> expand( SearchTree& tree, NodeId node, Rng& rng );

struct RolloutResult
{
    double reward = 0.0;
    GridIndex cell{};
};

/// Completes the unassigned plies uniformly at random and scores the orientation.
RolloutResult rollout( const SearchTree& tree, NodeId node, const SuccessModel& model, const UctConfig& cfg, Rng& rng );
RolloutResult rollout( const SearchTree& tree, NodeId node, const PatientProfile& patient, const UctConfig& cfg, Rng& rng );

/// Adds `reward` to every node on `path` as a running average.
void backpropagate( SearchTree& tree, std::span<const NodeId> path, double reward );

struct MctsResult
{
    JointOrientation orientation;
    std::int64_t root_visits = 0;
    std::size_t tree_size = 0;
    int path_depth = 0; ///< depth reached by the most-visited path before completion
};

/// Runs cfg.iterations of select/expand/rollout/backpropagate and returns the end of
/// the most-visited path. A path that stops short of a full orientation is completed
/// with the best rollout seen below its last node.
MctsResult mcts_search( const ActionGrid& grid, const SuccessModel& model, const UctConfig& cfg, Rng& rng );

JointOrientation mcts_generate( const ActionGrid& grid, const SuccessModel& model, const UctConfig& cfg, Rng& rng );
JointOrientation mcts_generate( const ActionGrid& grid, const PatientProfile& patient, const UctConfig& cfg, Rng& rng );

} // namespace rehab
