#include "ctrlk/posets.hpp"

#include <algorithm>
#include <functional>

namespace ctrlk {

std::size_t Poset::index(const std::string& e) const {
  auto it = index_.find(e);
  if (it == index_.end()) throw Error(ErrorKind::UnknownLabel, e);
  return it->second;
}

bool Poset::less(const std::string& a, const std::string& b) const {
  return above_[index(a)][index(b)];
}

std::vector<Relation> Poset::relations() const {
  std::vector<Relation> out;
  for (std::size_t a = 0; a < size(); ++a)
    for (std::size_t b = 0; b < size(); ++b)
      if (above_[a][b]) out.emplace_back(elements_[a], elements_[b]);
  return out;
}

std::vector<Relation> Poset::covers() const {
  std::vector<Relation> out;
  for (std::size_t a = 0; a < size(); ++a)
    for (std::size_t b = 0; b < size(); ++b) {
      if (!above_[a][b]) continue;
      bool between = false;
      for (std::size_t c = above_[a].find_first(); c != boost::dynamic_bitset<>::npos && !between;
           c = above_[a].find_next(c))
        between = above_[c][b];
      if (!between) out.emplace_back(elements_[a], elements_[b]);
    }
  return out;
}

Poset Poset::restrict_to(const std::vector<std::string>& subset) const {
  std::vector<std::string> keep;
  std::vector<bool> mark(size(), false);
  for (const auto& e : subset) mark[index(e)] = true;
  for (std::size_t i = 0; i < size(); ++i)
    if (mark[i]) keep.push_back(elements_[i]);
  std::vector<Relation> rels;
  for (std::size_t a = 0; a < size(); ++a)
    for (std::size_t b = 0; b < size(); ++b)
      if (mark[a] && mark[b] && above_[a][b]) rels.emplace_back(elements_[a], elements_[b]);
  return close_relations(std::move(keep), rels, ErrorKind::CycleDetected);
}

bool operator==(const Poset& a, const Poset& b) {
  return a.elements_ == b.elements_ && a.above_ == b.above_;
}

Poset close_relations(std::vector<std::string> elements, const std::vector<Relation>& rels,
                      ErrorKind on_cycle) {
  Poset p;
  p.elements_ = std::move(elements);
  for (std::size_t i = 0; i < p.elements_.size(); ++i)
    if (!p.index_.emplace(p.elements_[i], i).second)
      throw Error(ErrorKind::DuplicateLabel, p.elements_[i]);
  const std::size_t n = p.elements_.size();
  std::vector<std::vector<std::size_t>> succ(n);
  for (const auto& [a, b] : rels) succ[p.index(a)].push_back(p.index(b));

  // Cycle search by DFS; the witness lists the cycle in traversal order.
  std::vector<int> state(n, 0);
  std::vector<std::size_t> stack;
  std::function<bool(std::size_t)> dfs = [&](std::size_t v) -> bool {
    state[v] = 1;
    stack.push_back(v);
    for (std::size_t w : succ[v]) {
      if (state[w] == 1) {
        std::string witness;
        auto it = std::find(stack.begin(), stack.end(), w);
        for (; it != stack.end(); ++it) witness += p.elements_[*it] + " < ";
        witness += p.elements_[w];
        throw Error(on_cycle, witness);
      }
      if (state[w] == 0) dfs(w);
    }
    stack.pop_back();
    state[v] = 2;
    return false;
  };
  for (std::size_t v = 0; v < n; ++v)
    if (state[v] == 0) dfs(v);

  // Closure in reverse topological order.
  std::vector<std::size_t> order;
  std::vector<bool> done(n, false);
  std::function<void(std::size_t)> post = [&](std::size_t v) {
    done[v] = true;
    for (std::size_t w : succ[v])
      if (!done[w]) post(w);
    order.push_back(v);
  };
  for (std::size_t v = 0; v < n; ++v)
    if (!done[v]) post(v);
  p.above_.assign(n, boost::dynamic_bitset<>(n));
  for (std::size_t v : order)
    for (std::size_t w : succ[v]) {
      p.above_[v].set(w);
      p.above_[v] |= p.above_[w];
    }
  return p;
}

Poset validate_poset(std::vector<std::string> elements, const std::vector<Relation>& covers) {
  return close_relations(std::move(elements), covers, ErrorKind::CycleDetected);
}

Poset antichain(std::vector<std::string> elements) {
  return close_relations(std::move(elements), {}, ErrorKind::CycleDetected);
}

Poset find_common_order(std::vector<std::string> elements,
                        const std::vector<Relation>& constraints) {
  return close_relations(std::move(elements), constraints, ErrorKind::NoOrderExists);
}

BoundednessReport is_epsilon_bounded(const Poset& p, const std::map<std::string, std::string>& loc,
                                     double eps, const ControlSpace& x) {
  BoundednessReport report;
  const std::size_t n = p.size();
  std::vector<std::size_t> where(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto it = loc.find(p.elements()[i]);
    if (it == loc.end()) throw Error(ErrorKind::UnknownPoint, "no location for " + p.elements()[i]);
    where[i] = x.index(it->second);
  }
  // Longest chain starting at each element, by memoized recursion on the closure.
  std::vector<std::size_t> longest(n, 0);
  std::function<std::size_t(std::size_t)> chain = [&](std::size_t v) -> std::size_t {
    if (longest[v]) return longest[v];
    std::size_t best = 1;
    for (std::size_t w = 0; w < n; ++w)
      if (p.less(v, w)) best = std::max(best, 1 + chain(w));
    return longest[v] = best;
  };
  for (std::size_t v = 0; v < n; ++v) {
    report.max_chain_length[p.elements()[v]] = chain(v);
    for (std::size_t w = 0; w < n; ++w) {
      if (!p.less(v, w)) continue;
      const double d = x.distance(where[v], where[w]);
      report.chain_radius = std::max(report.chain_radius, d);
      if (d >= eps && report.epsilon_bounded) {
        report.epsilon_bounded = false;
        report.violating_element = p.elements()[v];
      }
    }
  }
  return report;
}

Poset image_partial_order(const std::vector<PointSet>& chain,
                          const std::vector<std::string>& order) {
  if (chain.empty()) return antichain(order);
  for (std::size_t k = 1; k < chain.size(); ++k)
    for (const auto& e : chain[k - 1])
      if (!chain[k].count(e))
        throw Error(ErrorKind::NotNested, e + " leaves the chain at stage " + std::to_string(k));
  std::vector<std::string> elements;
  if (order.empty()) {
    elements.assign(chain.back().begin(), chain.back().end());
  } else {
    elements = order;
    if (PointSet(order.begin(), order.end()) != chain.back())
      throw Error(ErrorKind::NotNested, "element list differs from the last stage");
  }
  std::map<std::string, std::size_t> stage;
  for (const auto& e : elements) {
    std::size_t k = 0;
    while (!chain[k].count(e)) ++k;
    stage[e] = k;
  }
  std::vector<Relation> rels;
  for (const auto& a : elements)
    for (const auto& b : elements)
      if (stage[a] > stage[b]) rels.emplace_back(a, b);
  return close_relations(std::move(elements), rels, ErrorKind::CycleDetected);
}

Poset shuffle_orders(const Poset& pc, const Poset& psc, const std::vector<ImagePair>& images,
                     const std::optional<Placement>& placement) {
  std::vector<std::string> elements = psc.elements();
  for (const auto& e : pc.elements()) {
    if (psc.contains(e)) throw Error(ErrorKind::DuplicateLabel, e);
    elements.push_back(e);
  }
  std::vector<Relation> rels = psc.relations();
  for (const auto& r : pc.relations()) rels.push_back(r);
  for (const auto& t : psc.elements())
    for (const auto& s : pc.elements()) {
      bool ok = true;
      for (const auto& im : images)
        if (im.sc_image.count(t) && !im.c_image.count(s)) {
          ok = false;
          break;
        }
      if (!ok) continue;
      if (placement && placement->space) {
        auto lt = placement->loc.find(t);
        auto ls = placement->loc.find(s);
        if (lt == placement->loc.end()) throw Error(ErrorKind::UnknownPoint, "no location for " + t);
        if (ls == placement->loc.end()) throw Error(ErrorKind::UnknownPoint, "no location for " + s);
        if (placement->space->distance(lt->second, ls->second) >= 5 * placement->eps) continue;
      }
      rels.emplace_back(t, s);
    }
  return close_relations(std::move(elements), rels, ErrorKind::CycleDetected);
}

}  // namespace ctrlk
