#ifndef MASSES_TAXONOMY_HPP
#define MASSES_TAXONOMY_HPP

#include <algorithm>
#include <fstream>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "masses/embedding_table.hpp"
#include "masses/error.hpp"

namespace masses {

/// Concept DAG for Wu-Palmer similarity. Depths, ancestor sets and the word
/// index are computed once at construction; the object is read-only after.
class Taxonomy {
 public:
  using NodeId = std::size_t;

  /// `edges` holds (child, parent) pairs, `words` holds (surface word, node)
  /// pairs. Every node name also maps to itself as a word.
  Taxonomy(const std::vector<std::pair<std::string, std::string>>& edges,
           const std::vector<std::pair<std::string, std::string>>& words) {
    for (const auto& [child, parent] : edges) {
      const NodeId c = intern(child);
      const NodeId p = intern(parent);
      if (std::find(parents_[c].begin(), parents_[c].end(), p) == parents_[c].end()) {
        parents_[c].push_back(p);
      }
    }
    for (const auto& [word, node] : words) {
      auto& nodes = word_index_[word];
      const NodeId n = intern(node);
      if (std::find(nodes.begin(), nodes.end(), n) == nodes.end()) nodes.push_back(n);
    }
    if (names_.empty()) throw InputError("taxonomy has no nodes");
    const auto order = parents_first_order();
    find_root();
    depth_.assign(names_.size(), 0);
    ancestors_.resize(names_.size());
    for (NodeId n : order) {
      std::vector<NodeId> anc{n};
      int depth = 0;
      for (NodeId p : parents_[n]) {
        anc.insert(anc.end(), ancestors_[p].begin(), ancestors_[p].end());
        depth = depth == 0 ? depth_[p] : std::min(depth, depth_[p]);
      }
      std::sort(anc.begin(), anc.end());
      anc.erase(std::unique(anc.begin(), anc.end()), anc.end());
      ancestors_[n] = std::move(anc);
      depth_[n] = depth + 1;
    }
  }

  std::size_t node_count() const { return names_.size(); }
  const std::string& root() const { return names_[root_]; }
  const std::string& name(NodeId n) const { return names_.at(n); }

  std::optional<NodeId> node(std::string_view name) const {
    auto it = ids_.find(name);
    if (it == ids_.end()) return std::nullopt;
    return it->second;
  }

  /// Depth with the root at 1; each node sits one below its shallowest parent.
  int depth(NodeId n) const { return depth_.at(n); }
  std::optional<int> depth(std::string_view name) const {
    auto n = node(name);
    if (!n) return std::nullopt;
    return depth_[*n];
  }

  /// Nodes a surface word denotes: explicit word lines plus a node of the same name.
  std::vector<NodeId> nodes_for(std::string_view word) const {
    std::vector<NodeId> out;
    if (auto it = word_index_.find(word); it != word_index_.end()) out = it->second;
    if (auto n = node(word); n && std::find(out.begin(), out.end(), *n) == out.end()) {
      out.push_back(*n);
    }
    return out;
  }

  /// Depth of the deepest common ancestor of two nodes.
  int lcs_depth(NodeId a, NodeId b) const {
    const auto& x = ancestors_.at(a);
    const auto& y = ancestors_.at(b);
    int best = 0;
    std::size_t i = 0, j = 0;
    while (i < x.size() && j < y.size()) {
      if (x[i] < y[j]) {
        ++i;
      } else if (y[j] < x[i]) {
        ++j;
      } else {
        best = std::max(best, depth_[x[i]]);
        ++i;
        ++j;
      }
    }
    return best;
  }

 private:
  NodeId intern(const std::string& name) {
    auto [it, fresh] = ids_.try_emplace(name, names_.size());
    if (fresh) {
      names_.push_back(name);
      parents_.emplace_back();
    }
    return it->second;
  }

  // Depth-first over parent edges; the finish order lists parents before
  // children. A grey node reached again closes a cycle.
  std::vector<NodeId> parents_first_order() const {
    enum class Mark : unsigned char { kWhite, kGrey, kBlack };
    std::vector<Mark> mark(names_.size(), Mark::kWhite);
    std::vector<NodeId> order;
    order.reserve(names_.size());
    std::vector<std::pair<NodeId, std::size_t>> stack;
    for (NodeId start = 0; start < names_.size(); ++start) {
      if (mark[start] != Mark::kWhite) continue;
      stack.push_back({start, 0});
      mark[start] = Mark::kGrey;
      while (!stack.empty()) {
        auto& [n, next] = stack.back();
        if (next < parents_[n].size()) {
          const NodeId p = parents_[n][next++];
          if (mark[p] == Mark::kGrey) throw InputError("taxonomy cycle through node '" + names_[p] + "'");
          if (mark[p] == Mark::kWhite) {
            mark[p] = Mark::kGrey;
            stack.push_back({p, 0});
          }
        } else {
          mark[n] = Mark::kBlack;
          order.push_back(n);
          stack.pop_back();
        }
      }
    }
    return order;
  }

  void find_root() {
    std::vector<std::string> roots;
    for (NodeId n = 0; n < names_.size(); ++n) {
      if (parents_[n].empty()) {
        roots.push_back(names_[n]);
        root_ = n;
      }
    }
    if (roots.size() != 1) {
      std::string listing;
      for (const auto& r : roots) listing += (listing.empty() ? "" : ", ") + r;
      throw InputError("taxonomy must have exactly one root, found " + std::to_string(roots.size()) +
                       (listing.empty() ? "" : ": " + listing));
    }
  }

  std::vector<std::string> names_;
  std::unordered_map<std::string, NodeId, StringHash, std::equal_to<>> ids_;
  std::vector<std::vector<NodeId>> parents_;
  std::unordered_map<std::string, std::vector<NodeId>, StringHash, std::equal_to<>> word_index_;
  std::vector<int> depth_;
  std::vector<std::vector<NodeId>> ancestors_;
  NodeId root_ = 0;
};

/// Tab-separated taxonomy file: "child\tparent" edge lines and
/// "word\t#\tnode" word lines. Blank lines and lines starting with '#'
/// without a tab are ignored.
inline Taxonomy load_taxonomy(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open taxonomy file: " + path);
  std::vector<std::pair<std::string, std::string>> edges, words;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '#' && line.find('\t') == std::string::npos) continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      const auto tab = line.find('\t', start);
      fields.push_back(line.substr(start, tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    const bool empty_field =
        std::any_of(fields.begin(), fields.end(), [](const std::string& f) { return f.empty(); });
    if (fields.size() == 2 && !empty_field) {
      edges.emplace_back(fields[0], fields[1]);
    } else if (fields.size() == 3 && fields[1] == "#" && !empty_field) {
      words.emplace_back(fields[0], fields[2]);
    } else {
      throw InputError(path + ":" + std::to_string(line_no) +
                       ": expected 'child<TAB>parent' or 'word<TAB>#<TAB>node'");
    }
  }
  return Taxonomy(edges, words);
}

}  // namespace masses

#endif  // MASSES_TAXONOMY_HPP
