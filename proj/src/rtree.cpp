#include "geosearch/rtree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace geosearch {

namespace {

double enlargement(const Rect& box, const Rect& rect) {
    return box.merged(rect).area() - box.area();
}

}  // namespace

MbrTree MbrTree::build(std::span<const std::pair<Rect, uint32_t>> items) {
    MbrTree tree;
    for (const auto& [rect, doc_id] : items) {
        tree.insert(rect, doc_id);
    }
    return tree;
}

void MbrTree::insert(const Rect& rect, uint32_t doc_id) {
    if (!root_) {
        root_ = std::make_unique<Node>();
        root_->box = rect;
    }
    std::vector<Node*> path;
    Node* leaf = choose_leaf(root_.get(), rect, path);
    leaf->entries.emplace_back(rect, doc_id);
    leaf->box = leaf->fanout() == 1 ? rect : leaf->box.merged(rect);
    ++size_;

    // Walk back up, splitting overflowing nodes and fixing boxes.
    std::unique_ptr<Node> carry;  // sibling produced by a split one level down
    for (std::size_t level = path.size(); level-- > 0;) {
        Node* node = path[level];
        if (carry) {
            node->children.push_back(std::move(carry));
        }
        recompute_box(*node);
        if (node->fanout() > kMaxEntries && level > 0) {
            carry = split(*node);
        }
    }
    Node* top = path.empty() ? root_.get() : path.front();
    if (carry || top->fanout() > kMaxEntries) {
        if (!carry && top->fanout() > kMaxEntries) {
            carry = split(*top);
        }
        if (carry) {
            auto new_root = std::make_unique<Node>();
            new_root->leaf = false;
            new_root->children.push_back(std::move(root_));
            new_root->children.push_back(std::move(carry));
            recompute_box(*new_root);
            root_ = std::move(new_root);
        }
    }
}

MbrTree::Node* MbrTree::choose_leaf(Node* node, const Rect& rect, std::vector<Node*>& path) {
    path.push_back(node);
    while (!node->leaf) {
        Node* best = nullptr;
        double best_enlarge = std::numeric_limits<double>::infinity();
        double best_area = std::numeric_limits<double>::infinity();
        for (const auto& child : node->children) {
            double e = enlargement(child->box, rect);
            double a = child->box.area();
            if (e < best_enlarge || (e == best_enlarge && a < best_area)) {
                best = child.get();
                best_enlarge = e;
                best_area = a;
            }
        }
        node = best;
        path.push_back(node);
    }
    return node;
}

void MbrTree::recompute_box(Node& node) {
    if (node.leaf) {
        node.box = node.entries.front().first;
        for (std::size_t i = 1; i < node.entries.size(); ++i) {
            node.box = node.box.merged(node.entries[i].first);
        }
    } else {
        node.box = node.children.front()->box;
        for (std::size_t i = 1; i < node.children.size(); ++i) {
            node.box = node.box.merged(node.children[i]->box);
        }
    }
}

// Quadratic split: seed with the pair wasting the most area, then assign each
// remaining entry to the group whose box it enlarges least.
std::unique_ptr<MbrTree::Node> MbrTree::split(Node& node) {
    auto sibling = std::make_unique<Node>();
    sibling->leaf = node.leaf;

    auto box_of = [&](std::size_t i) -> const Rect& {
        return node.leaf ? node.entries[i].first : node.children[i]->box;
    };
    const std::size_t n = node.fanout();

    std::size_t seed_a = 0, seed_b = 1;
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            double waste = box_of(i).merged(box_of(j)).area() - box_of(i).area() - box_of(j).area();
            if (waste > worst) {
                worst = waste;
                seed_a = i;
                seed_b = j;
            }
        }
    }

    std::vector<std::size_t> group(n, 2);  // 0 = stay, 1 = sibling, 2 = unassigned
    group[seed_a] = 0;
    group[seed_b] = 1;
    Rect box_a = box_of(seed_a);
    Rect box_b = box_of(seed_b);
    std::size_t count_a = 1, count_b = 1;

    for (std::size_t assigned = 2; assigned < n; ++assigned) {
        // Must keep both groups able to reach the minimum fill.
        std::size_t remaining = n - assigned;
        std::size_t pick = n;
        int pick_group = 0;
        double best_diff = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < n; ++i) {
            if (group[i] != 2) {
                continue;
            }
            double da = enlargement(box_a, box_of(i));
            double db = enlargement(box_b, box_of(i));
            double diff = std::abs(da - db);
            if (diff > best_diff) {
                best_diff = diff;
                pick = i;
                pick_group = da < db ? 0 : da > db ? 1 : (box_a.area() <= box_b.area() ? 0 : 1);
            }
        }
        if (count_a + remaining == kMinEntries) {
            pick_group = 0;
        } else if (count_b + remaining == kMinEntries) {
            pick_group = 1;
        }
        group[pick] = static_cast<std::size_t>(pick_group);
        if (pick_group == 0) {
            box_a = box_a.merged(box_of(pick));
            ++count_a;
        } else {
            box_b = box_b.merged(box_of(pick));
            ++count_b;
        }
    }

    if (node.leaf) {
        std::vector<std::pair<Rect, uint32_t>> keep;
        for (std::size_t i = 0; i < n; ++i) {
            (group[i] == 0 ? keep : sibling->entries).push_back(node.entries[i]);
        }
        node.entries = std::move(keep);
    } else {
        std::vector<std::unique_ptr<Node>> keep;
        for (std::size_t i = 0; i < n; ++i) {
            (group[i] == 0 ? keep : sibling->children).push_back(std::move(node.children[i]));
        }
        node.children = std::move(keep);
    }
    recompute_box(node);
    recompute_box(*sibling);
    return sibling;
}

std::vector<uint32_t> MbrTree::query(const Rect& query_rect) const {
    std::vector<uint32_t> out;
    if (root_) {
        collect(root_.get(), query_rect, out);
        std::sort(out.begin(), out.end());
    }
    return out;
}

void MbrTree::collect(const Node* node, const Rect& query_rect, std::vector<uint32_t>& out) {
    if (!node->box.intersects(query_rect)) {
        return;
    }
    if (node->leaf) {
        for (const auto& [rect, doc_id] : node->entries) {
            if (rect.intersects(query_rect)) {
                out.push_back(doc_id);
            }
        }
    } else {
        for (const auto& child : node->children) {
            collect(child.get(), query_rect, out);
        }
    }
}

bool MbrTree::check_invariants() const {
    if (!root_) {
        return true;
    }
    int leaf_depth = -1;
    return check_node(root_.get(), 0, leaf_depth);
}

bool MbrTree::check_node(const Node* node, int depth, int& leaf_depth) {
    if (node->leaf) {
        if (leaf_depth == -1) {
            leaf_depth = depth;
        }
        if (depth != leaf_depth) {
            return false;
        }
        for (const auto& [rect, doc_id] : node->entries) {
            if (!node->box.contains(rect)) {
                return false;
            }
        }
        return true;
    }
    for (const auto& child : node->children) {
        if (!node->box.contains(child->box)) {
            return false;
        }
        if (!check_node(child.get(), depth + 1, leaf_depth)) {
            return false;
        }
    }
    return true;
}

}  // namespace geosearch
