#include "aqsim/network.hpp"

#include <algorithm>
#include <ostream>
#include <set>
#include <stdexcept>

#include "aqsim/text_io.hpp"

namespace aqsim {

std::ostream& operator<<(std::ostream& os, const Link& link)
{
    return os << link.from << "->" << link.to;
}

Network::Network(NodeId num_nodes, int max_path_hops)
{
    if (num_nodes < 1) throw std::invalid_argument("network needs at least one node");
    adjacency_.resize(static_cast<std::size_t>(num_nodes));
    set_max_path_hops(max_path_hops);
    rebuild_offsets();
}

void Network::set_max_path_hops(int d)
{
    if (d < 1) throw std::invalid_argument("max path hops must be >= 1");
    max_path_hops_ = d;
}

void Network::add_edge(NodeId i, NodeId j)
{
    if (!has_node(i) || !has_node(j)) throw std::out_of_range("edge endpoint out of range");
    if (i == j) throw std::invalid_argument("self-loop " + std::to_string(i));
    if (has_edge(i, j)) throw std::invalid_argument("duplicate edge " + std::to_string(i) + " " + std::to_string(j));
    auto insert_sorted = [](std::vector<NodeId>& v, NodeId x) { v.insert(std::lower_bound(v.begin(), v.end(), x), x); };
    insert_sorted(adjacency_[static_cast<std::size_t>(i)], j);
    insert_sorted(adjacency_[static_cast<std::size_t>(j)], i);
    feeds_.push_back({i, j});
    rebuild_offsets();
}

bool Network::has_edge(NodeId i, NodeId j) const
{
    if (!has_node(i) || !has_node(j)) return false;
    const auto& n = adjacency_[static_cast<std::size_t>(i)];
    return std::binary_search(n.begin(), n.end(), j);
}

std::optional<LinkId> Network::link_id(NodeId from, NodeId to) const
{
    if (!has_node(from)) return std::nullopt;
    const auto& n = adjacency_[static_cast<std::size_t>(from)];
    auto it = std::lower_bound(n.begin(), n.end(), to);
    if (it == n.end() || *it != to) return std::nullopt;
    return first_link(from) + static_cast<std::size_t>(it - n.begin());
}

Link Network::link_at(LinkId id) const
{
    if (id >= num_links()) throw std::out_of_range("link id out of range");
    auto it = std::upper_bound(offsets_.begin(), offsets_.end(), id);
    auto node = static_cast<std::size_t>(it - offsets_.begin()) - 1;
    return {static_cast<NodeId>(node), adjacency_[node][id - offsets_[node]]};
}

void Network::rebuild_offsets()
{
    offsets_.assign(adjacency_.size() + 1, 0);
    for (std::size_t i = 0; i < adjacency_.size(); ++i) offsets_[i + 1] = offsets_[i] + adjacency_[i].size();
}

std::size_t max_degree(const Network& network)
{
    std::size_t best = 0;
    for (NodeId i = 0; i < network.num_nodes(); ++i) best = std::max(best, network.degree(i));
    return best;
}

std::vector<NodeId> Path::nodes() const
{
    std::vector<NodeId> out;
    if (links.empty()) return out;
    out.push_back(links.front().from);
    for (const auto& l : links) out.push_back(l.to);
    return out;
}

Path Path::from_nodes(const std::vector<NodeId>& nodes)
{
    Path p;
    for (std::size_t k = 1; k < nodes.size(); ++k) p.links.push_back({nodes[k - 1], nodes[k]});
    return p;
}

std::string PathVerdict::describe() const
{
    switch (problem) {
        case Problem::None: return "valid";
        case Problem::Empty: return "empty path";
        case Problem::TooLong: return "path longer than max hops";
        case Problem::NotAnEdge: return "link " + std::to_string(link_index) + " is not an edge";
        case Problem::BrokenChain: return "link " + std::to_string(link_index) + " does not chain";
        case Problem::RepeatedLink: return "link " + std::to_string(link_index) + " repeats an earlier link";
    }
    return "unknown";
}

PathVerdict validate_path(const Network& network, const Path& path)
{
    using P = PathVerdict::Problem;
    if (path.links.empty()) return {P::Empty, 0};
    std::set<Link> seen;
    for (std::size_t k = 0; k < path.links.size(); ++k) {
        const Link& l = path.links[k];
        if (k > 0 && path.links[k - 1].to != l.from) return {P::BrokenChain, k};
        if (!network.has_edge(l.from, l.to)) return {P::NotAnEdge, k};
        if (!seen.insert(l).second) return {P::RepeatedLink, k};
    }
    if (path.links.size() > static_cast<std::size_t>(network.max_path_hops())) return {P::TooLong, 0};
    return {};
}

Network read_network(std::istream& in, const std::string& source)
{
    std::optional<Network> net;
    std::optional<int> hops;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto tok = tokenize_line(line);
        if (tok.empty()) continue;
        try {
            if (tok[0] == "nodes" && tok.size() == 2) {
                if (net) throw std::invalid_argument("repeated 'nodes' header");
                net.emplace(static_cast<NodeId>(parse_integer(tok[1])));
            } else if (tok[0] == "hops" && tok.size() == 2) {
                hops = static_cast<int>(parse_integer(tok[1]));
            } else if (tok[0] == "edge" && tok.size() == 3) {
                if (!net) throw std::invalid_argument("'edge' before 'nodes' header");
                net->add_edge(static_cast<NodeId>(parse_integer(tok[1])), static_cast<NodeId>(parse_integer(tok[2])));
            } else {
                throw std::invalid_argument("unrecognized line");
            }
        } catch (const ParseError&) {
            throw;
        } catch (const std::exception& e) {
            throw ParseError(source, lineno, e.what());
        }
    }
    if (!net) throw ParseError(source, lineno, "missing 'nodes' header");
    if (hops) net->set_max_path_hops(*hops);
    return *net;
}

Network load_network(const std::string& path)
{
    auto in = open_input(path);
    return read_network(in, path);
}

void write_network(std::ostream& out, const Network& network)
{
    out << "nodes " << network.num_nodes() << "\n";
    out << "hops " << network.max_path_hops() << "\n";
    for (const auto& e : network.feeds()) out << "edge " << e.from << " " << e.to << "\n";
}

}  // namespace aqsim
