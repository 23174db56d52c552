#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <utility>
#include <vector>

#include "dlab/errors.hpp"
#include "dlab/rational.hpp"

namespace dlab {

/// Immutable bipartite graph on index classes [0, left_order) x
/// [0, right_order). Edges are kept both as a sorted deduplicated list and as
/// per-left-vertex bitsets over the right class, which makes codegree
/// (common-neighborhood) queries a word-parallel AND/popcount.
class BipartiteGraph {
  public:
    using Edge = std::pair<std::int32_t, std::int32_t>;

    BipartiteGraph() = default;

    BipartiteGraph(std::int64_t left_order, std::int64_t right_order, std::vector<Edge> edges)
        : left_(left_order), right_(right_order), edges_(std::move(edges)) {
        if (left_ < 0 || right_ < 0)
            throw MalformedGraph("BipartiteGraph: negative class order");
        for (const Edge& e : edges_) {
            if (e.first < 0 || e.first >= left_ || e.second < 0 || e.second >= right_)
                throw MalformedGraph("BipartiteGraph: edge (" + std::to_string(e.first) + "," +
                                     std::to_string(e.second) + ") out of range");
        }
        std::sort(edges_.begin(), edges_.end());
        edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
        words_ = static_cast<std::size_t>((right_ + 63) / 64);
        bits_.assign(static_cast<std::size_t>(left_) * words_, 0);
        degree_.assign(static_cast<std::size_t>(left_), 0);
        right_degree_.assign(static_cast<std::size_t>(right_), 0);
        for (const Edge& e : edges_) {
            bits_[static_cast<std::size_t>(e.first) * words_ +
                  static_cast<std::size_t>(e.second) / 64] |=
                std::uint64_t{1} << (static_cast<std::size_t>(e.second) % 64);
            ++degree_[static_cast<std::size_t>(e.first)];
            ++right_degree_[static_cast<std::size_t>(e.second)];
        }
    }

    static BipartiteGraph complete(std::int64_t left_order, std::int64_t right_order) {
        std::vector<Edge> es;
        es.reserve(static_cast<std::size_t>(left_order * right_order));
        for (std::int32_t i = 0; i < left_order; ++i)
            for (std::int32_t j = 0; j < right_order; ++j) es.emplace_back(i, j);
        return BipartiteGraph(left_order, right_order, std::move(es));
    }

    std::int64_t left_order() const { return left_; }
    std::int64_t right_order() const { return right_; }
    const std::vector<Edge>& edges() const { return edges_; }
    std::int64_t edge_count() const { return static_cast<std::int64_t>(edges_.size()); }

    std::int64_t degree(std::int64_t left_vertex) const {
        check_left(left_vertex);
        return degree_[static_cast<std::size_t>(left_vertex)];
    }
    std::int64_t right_degree(std::int64_t right_vertex) const {
        check_right(right_vertex);
        return right_degree_[static_cast<std::size_t>(right_vertex)];
    }

    bool has_edge(std::int64_t i, std::int64_t j) const {
        check_left(i);
        check_right(j);
        return (bits_[static_cast<std::size_t>(i) * words_ + static_cast<std::size_t>(j) / 64] >>
                (static_cast<std::size_t>(j) % 64)) &
               1U;
    }

    /// Right-class neighbors of a left vertex, ascending.
    std::vector<std::int32_t> neighbors(std::int64_t left_vertex) const {
        check_left(left_vertex);
        std::vector<std::int32_t> out;
        out.reserve(static_cast<std::size_t>(degree_[static_cast<std::size_t>(left_vertex)]));
        const std::uint64_t* row = bits_.data() + static_cast<std::size_t>(left_vertex) * words_;
        for (std::size_t w = 0; w < words_; ++w) {
            std::uint64_t word = row[w];
            while (word) {
                const int b = std::countr_zero(word);
                out.push_back(static_cast<std::int32_t>(w * 64 + static_cast<std::size_t>(b)));
                word &= word - 1;
            }
        }
        return out;
    }

    /// |N(i) ∩ N(j)| for two left vertices.
    std::int64_t codegree(std::int64_t i, std::int64_t j) const {
        check_left(i);
        check_left(j);
        const std::uint64_t* a = bits_.data() + static_cast<std::size_t>(i) * words_;
        const std::uint64_t* b = bits_.data() + static_cast<std::size_t>(j) * words_;
        std::int64_t c = 0;
        for (std::size_t w = 0; w < words_; ++w) c += std::popcount(a[w] & b[w]);
        return c;
    }

    /// Common right-class neighbors of two left vertices, ascending.
    std::vector<std::int32_t> common_neighbors(std::int64_t i, std::int64_t j) const {
        check_left(i);
        check_left(j);
        const std::uint64_t* a = bits_.data() + static_cast<std::size_t>(i) * words_;
        const std::uint64_t* b = bits_.data() + static_cast<std::size_t>(j) * words_;
        std::vector<std::int32_t> out;
        for (std::size_t w = 0; w < words_; ++w) {
            std::uint64_t word = a[w] & b[w];
            while (word) {
                const int bit = std::countr_zero(word);
                out.push_back(static_cast<std::int32_t>(w * 64 + static_cast<std::size_t>(bit)));
                word &= word - 1;
            }
        }
        return out;
    }

    /// |E| / (|L|·|R|) as an exact rational; zero for empty classes.
    Rational density() const {
        if (left_ == 0 || right_ == 0) return Rational(0);
        return Rational(edge_count(), left_ * right_);
    }

    /// Transposed copy (color classes swapped).
    BipartiteGraph transposed() const {
        std::vector<Edge> es;
        es.reserve(edges_.size());
        for (const Edge& e : edges_) es.emplace_back(e.second, e.first);
        return BipartiteGraph(right_, left_, std::move(es));
    }

    /// Subgraph induced by sorted index subsets of each class, reindexed to
    /// the positions within the subsets.
    BipartiteGraph induced(const std::vector<std::int32_t>& left_ids,
                           const std::vector<std::int32_t>& right_ids) const {
        std::vector<std::int32_t> lpos(static_cast<std::size_t>(left_), -1);
        std::vector<std::int32_t> rpos(static_cast<std::size_t>(right_), -1);
        for (std::size_t k = 0; k < left_ids.size(); ++k) {
            check_left(left_ids[k]);
            lpos[static_cast<std::size_t>(left_ids[k])] = static_cast<std::int32_t>(k);
        }
        for (std::size_t k = 0; k < right_ids.size(); ++k) {
            check_right(right_ids[k]);
            rpos[static_cast<std::size_t>(right_ids[k])] = static_cast<std::int32_t>(k);
        }
        std::vector<Edge> es;
        for (const Edge& e : edges_) {
            const std::int32_t li = lpos[static_cast<std::size_t>(e.first)];
            const std::int32_t rj = rpos[static_cast<std::size_t>(e.second)];
            if (li >= 0 && rj >= 0) es.emplace_back(li, rj);
        }
        return BipartiteGraph(static_cast<std::int64_t>(left_ids.size()),
                              static_cast<std::int64_t>(right_ids.size()), std::move(es));
    }

  private:
    void check_left(std::int64_t i) const {
        if (i < 0 || i >= left_)
            throw MalformedGraph("BipartiteGraph: left index " + std::to_string(i) +
                                 " out of range");
    }
    void check_right(std::int64_t j) const {
        if (j < 0 || j >= right_)
            throw MalformedGraph("BipartiteGraph: right index " + std::to_string(j) +
                                 " out of range");
    }

    std::int64_t left_ = 0;
    std::int64_t right_ = 0;
    std::vector<Edge> edges_;
    std::size_t words_ = 0;
    std::vector<std::uint64_t> bits_;
    std::vector<std::int64_t> degree_;
    std::vector<std::int64_t> right_degree_;
};

}  // namespace dlab
