#pragma once

#include <map>
#include <vector>

namespace mad {

// Directed peer-observation map: peers(i) is the ordered list of agents whose
// previous-round answers agent i observes.
class Topology {
 public:
  Topology(int n_agents, std::map<int, std::vector<int>> peers);

  // Ring of designated peers: agent i observes agent (i+1) mod N.
  static Topology single_peer(int n_agents);
  // Every agent observes all N-1 others.
  static Topology fully_connected(int n_agents);

  int n_agents() const { return n_agents_; }
  const std::vector<int>& peers(int agent) const;

 private:
  int n_agents_;
  std::map<int, std::vector<int>> peers_;
};

}  // namespace mad
