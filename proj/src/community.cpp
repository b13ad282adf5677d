#include <algorithm>
#include <map>

#include "satfactor/analysis.hpp"

namespace satfactor::analysis {

bool Graph::add_edge(std::size_t u, std::size_t v) {
  if (u == v) return false;
  if (u >= adj_.size() || v >= adj_.size()) throw AnalysisError("add_edge: vertex out of range");
  auto& nu = adj_[u];
  auto it = std::lower_bound(nu.begin(), nu.end(), v);
  if (it != nu.end() && *it == v) return false;
  nu.insert(it, v);
  auto& nv = adj_[v];
  nv.insert(std::lower_bound(nv.begin(), nv.end(), u), u);
  ++edges_;
  return true;
}

bool Graph::has_edge(std::size_t u, std::size_t v) const {
  if (u >= adj_.size()) return false;
  return std::binary_search(adj_[u].begin(), adj_[u].end(), v);
}

Graph build_vig(const cnf::Formula& f) {
  Graph g(f.num_vars);
  for (const cnf::Clause& c : f.clauses) {
    auto lits = c.literals();
    for (std::size_t i = 0; i < lits.size(); ++i) {
      for (std::size_t j = i + 1; j < lits.size(); ++j) {
        g.add_edge(lits[i].var().id() - 1, lits[j].var().id() - 1);
      }
    }
  }
  return g;
}

double modularity(const Graph& g, const Partition& partition) {
  if (partition.size() != g.vertex_count()) throw AnalysisError("modularity: partition does not cover the graph");
  const std::size_t m = g.edge_count();
  if (m == 0) throw AnalysisError("modularity undefined on a graph without edges");

  std::map<std::size_t, unsigned __int128> intra;
  std::map<std::size_t, unsigned __int128> degree;
  for (std::size_t u = 0; u < g.vertex_count(); ++u) {
    degree[partition[u]] += g.degree(u);
    for (std::size_t v : g.neighbours(u)) {
      if (u < v && partition[u] == partition[v]) intra[partition[u]] += 1;
    }
  }
  // Q = (4m * sum e_c - sum d_c^2) / (4m^2), evaluated in integers first.
  unsigned __int128 pos = 0;
  unsigned __int128 neg = 0;
  for (const auto& [c, e] : intra) pos += 4 * static_cast<unsigned __int128>(m) * e;
  for (const auto& [c, d] : degree) neg += d * d;
  long double denom = 4.0L * static_cast<long double>(m) * static_cast<long double>(m);
  long double num = pos >= neg ? static_cast<long double>(pos - neg) : -static_cast<long double>(neg - pos);
  return static_cast<double>(num / denom);
}

CommunityResult cnm_communities(const Graph& g) {
  const std::size_t m = g.edge_count();
  if (m == 0) throw AnalysisError("modularity undefined on a graph without edges");
  const std::size_t n = g.vertex_count();

  // Merge gain scaled by 2m^2 is the integer 2m*l_ij - d_i*d_j.
  std::vector<std::map<std::size_t, std::int64_t>> links(n);
  std::vector<std::int64_t> degree(n);
  std::vector<bool> alive(n, true);
  std::vector<std::size_t> owner(n);
  for (std::size_t u = 0; u < n; ++u) {
    owner[u] = u;
    degree[u] = static_cast<std::int64_t>(g.degree(u));
    for (std::size_t v : g.neighbours(u)) links[u][v] = 1;
  }
  const __int128 two_m = 2 * static_cast<__int128>(m);

  for (;;) {
    __int128 best = 0;
    std::size_t bi = n;
    std::size_t bj = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (!alive[i]) continue;
      for (auto it = links[i].upper_bound(i); it != links[i].end(); ++it) {
        __int128 gain = two_m * it->second - static_cast<__int128>(degree[i]) * degree[it->first];
        if (gain > best) {
          best = gain;
          bi = i;
          bj = it->first;
        }
      }
    }
    if (bi == n) break;

    // Fold community bj into bi.
    for (const auto& [k, l] : links[bj]) {
      links[k].erase(bj);
      if (k == bi) continue;
      links[bi][k] += l;
      links[k][bi] += l;
    }
    links[bi].erase(bj);
    links[bj].clear();
    degree[bi] += degree[bj];
    alive[bj] = false;
    for (std::size_t u = 0; u < n; ++u) {
      if (owner[u] == bj) owner[u] = bi;
    }
  }

  CommunityResult result;
  result.partition.resize(n);
  std::map<std::size_t, std::size_t> dense;
  for (std::size_t u = 0; u < n; ++u) {
    auto [it, inserted] = dense.emplace(owner[u], dense.size());
    result.partition[u] = it->second;
  }
  result.q = modularity(g, result.partition);
  return result;
}

}  // namespace satfactor::analysis
