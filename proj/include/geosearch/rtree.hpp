#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "geosearch/geometry.hpp"

namespace geosearch {

// Memory-resident rectangle tree over (MBR, doc_id) pairs, Guttman-style
// insertion with quadratic splits. Immutable once built; queries are
// read-only and safe to run concurrently.
class MbrTree {
  public:
    MbrTree() = default;

    static MbrTree build(std::span<const std::pair<Rect, uint32_t>> items);

    std::size_t size() const { return size_; }

    // Doc IDs of all entries whose rectangle intersects `query` (closed
    // intersection: touching edges count), sorted ascending.
    std::vector<uint32_t> query(const Rect& query_rect) const;

    // Structural check used by tests: every node's box contains all of its
    // children's boxes and leaf depth is uniform.
    bool check_invariants() const;

  private:
    struct Node {
        bool leaf = true;
        Rect box;
        std::vector<std::pair<Rect, uint32_t>> entries;       // leaf payload
        std::vector<std::unique_ptr<Node>> children;          // inner payload

        std::size_t fanout() const { return leaf ? entries.size() : children.size(); }
    };

    static constexpr std::size_t kMaxEntries = 16;
    static constexpr std::size_t kMinEntries = 6;

    void insert(const Rect& rect, uint32_t doc_id);
    Node* choose_leaf(Node* node, const Rect& rect, std::vector<Node*>& path);
    static std::unique_ptr<Node> split(Node& node);
    static void recompute_box(Node& node);
    static void collect(const Node* node, const Rect& query_rect, std::vector<uint32_t>& out);
    static bool check_node(const Node* node, int depth, int& leaf_depth);

    std::unique_ptr<Node> root_;
    std::size_t size_ = 0;
};

}  // namespace geosearch
