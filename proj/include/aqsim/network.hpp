// network.hpp - Undirected multihop topology, directed links and routing paths.

#ifndef AQSIM_NETWORK_HPP
#define AQSIM_NETWORK_HPP

#include <compare>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace aqsim {

using NodeId = std::int32_t;
using Slot = std::int64_t;
using PacketId = std::int64_t;

// Ordered pair of nodes; traffic crosses it from `from` to `to`.
struct Link {
    NodeId from = 0;
    NodeId to = 0;

    friend auto operator<=>(const Link&, const Link&) = default;
};

std::ostream& operator<<(std::ostream& os, const Link& link);

// Dense index of a directed link inside a Network, see Network::link_id.
using LinkId = std::size_t;

class Network {
public:
    Network() = default;
    explicit Network(NodeId num_nodes, int max_path_hops = 1);

    NodeId num_nodes() const { return static_cast<NodeId>(adjacency_.size()); }
    int max_path_hops() const { return max_path_hops_; }
    void set_max_path_hops(int d);

    // Adds the undirected edge {i, j}. The declaration order (i -> j) is kept
    // as the edge's feed orientation, which is what fact-1 style checks use.
    void add_edge(NodeId i, NodeId j);

    bool has_node(NodeId i) const { return i >= 0 && i < num_nodes(); }
    bool has_edge(NodeId i, NodeId j) const;
    // Sorted ascending.
    const std::vector<NodeId>& neighbors(NodeId i) const { return adjacency_.at(static_cast<std::size_t>(i)); }
    std::size_t degree(NodeId i) const { return neighbors(i).size(); }
    std::size_t num_edges() const { return feeds_.size(); }
    // Edges in declaration order, oriented as declared.
    const std::vector<Link>& feeds() const { return feeds_; }

    // Directed links are numbered node by node, neighbors ascending:
    // link_id(i, neighbors(i)[k]) == first_link(i) + k.
    std::size_t num_links() const { return offsets_.empty() ? 0 : offsets_.back(); }
    LinkId first_link(NodeId i) const { return offsets_.at(static_cast<std::size_t>(i)); }
    std::optional<LinkId> link_id(NodeId from, NodeId to) const;
    Link link_at(LinkId id) const;

private:
    void rebuild_offsets();

    std::vector<std::vector<NodeId>> adjacency_;
    std::vector<Link> feeds_;
    std::vector<std::size_t> offsets_{0};
    int max_path_hops_ = 1;
};

// Max over nodes of |N(i)|; 0 for an edgeless network.
std::size_t max_degree(const Network& network);

struct Path {
    std::vector<Link> links;

    std::size_t hops() const { return links.size(); }
    NodeId source() const { return links.front().from; }
    NodeId destination() const { return links.back().to; }
    std::vector<NodeId> nodes() const;

    static Path from_nodes(const std::vector<NodeId>& nodes);

    friend bool operator==(const Path&, const Path&) = default;
};

struct PathVerdict {
    enum class Problem { None, Empty, TooLong, NotAnEdge, BrokenChain, RepeatedLink };

    Problem problem = Problem::None;
    // Index of the first offending link (0 for Empty/TooLong).
    std::size_t link_index = 0;

    bool valid() const { return problem == Problem::None; }
    std::string describe() const;
};

PathVerdict validate_path(const Network& network, const Path& path);

// Plain-text network format:
//   nodes <n>
//   hops <d>        (optional, default 1)
//   edge <i> <j>    (one per undirected edge)
// '#' starts a comment. Parse errors throw ParseError with the line number.
Network read_network(std::istream& in, const std::string& source = "network");
Network load_network(const std::string& path);
void write_network(std::ostream& out, const Network& network);

}  // namespace aqsim

#endif  // AQSIM_NETWORK_HPP
