#include "mad/topology.hpp"

#include <set>
#include <string>

#include "mad/errors.hpp"

namespace mad {

Topology::Topology(int n_agents, std::map<int, std::vector<int>> peers)
    : n_agents_(n_agents), peers_(std::move(peers)) {
  if (n_agents_ < 1) throw ConfigError("topology needs at least one agent");
  for (int i = 0; i < n_agents_; ++i) {
    auto it = peers_.find(i);
    if (it == peers_.end()) {
      peers_[i] = {};
      continue;
    }
    std::set<int> seen;
    for (int p : it->second) {
      if (p == i) throw ConfigError("agent " + std::to_string(i) + " lists itself as a peer");
      if (p < 0 || p >= n_agents_) throw ConfigError("peer id out of range for agent " + std::to_string(i));
      if (!seen.insert(p).second) throw ConfigError("duplicate peer for agent " + std::to_string(i));
    }
  }
  for (const auto& [id, _] : peers_)
    if (id < 0 || id >= n_agents_) throw ConfigError("peer map references unknown agent " + std::to_string(id));
}

Topology Topology::single_peer(int n_agents) {
  if (n_agents < 2) throw ConfigError("single-peer topology needs at least 2 agents");
  std::map<int, std::vector<int>> peers;
  for (int i = 0; i < n_agents; ++i) peers[i] = {(i + 1) % n_agents};
  return Topology(n_agents, std::move(peers));
}

Topology Topology::fully_connected(int n_agents) {
  if (n_agents < 2) throw ConfigError("fully-connected topology needs at least 2 agents");
  std::map<int, std::vector<int>> peers;
  for (int i = 0; i < n_agents; ++i)
    for (int j = 0; j < n_agents; ++j)
      if (j != i) peers[i].push_back(j);
  return Topology(n_agents, std::move(peers));
}

const std::vector<int>& Topology::peers(int agent) const {
  auto it = peers_.find(agent);
  if (it == peers_.end()) throw UsageError("unknown agent id " + std::to_string(agent));
  return it->second;
}

}  // namespace mad
