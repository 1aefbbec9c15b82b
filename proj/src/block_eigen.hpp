#pragma once

// Smallest eigenvalue of a Hermitian matrix given by its nonzero pattern.
// The pattern is split into connected components (rows i and j are linked
// when element (i, j) is stored); each component is an independent diagonal
// block up to a permutation, so its eigenvalues can be computed separately.

#include <algorithm>
#include <limits>
#include <numeric>
#include <unordered_map>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "qzb/fock.hpp"

namespace qzb::detail {

class UnionFind
{
public:
    explicit UnionFind(int n) : m_parent(std::size_t(n))
    {
        std::iota(m_parent.begin(), m_parent.end(), 0);
    }

    int find(int x)
    {
        while (m_parent[std::size_t(x)] != x) {
            m_parent[std::size_t(x)] =
                m_parent[std::size_t(m_parent[std::size_t(x)])];
            x = m_parent[std::size_t(x)];
        }
        return x;
    }

    void unite(int x, int y)
    {
        x = find(x);
        y = find(y);
        if (x != y) {
            m_parent[std::size_t(std::max(x, y))] = std::min(x, y);
        }
    }

private:
    std::vector<int> m_parent;
};

/// `entries` holds (row, col, value) triplets; rows/cols < dim. Entries that
/// are missing are treated as exact zeros. Rows that appear in no entry form
/// 1x1 zero blocks.
template <typename Triplets>
double min_eigenvalue_by_blocks(int dim, const Triplets& entries)
{
    UnionFind uf(dim);
    std::vector<char> touched(std::size_t(dim), 0);
    for (const auto& [r, c, v] : entries) {
        uf.unite(r, c);
        touched[std::size_t(r)] = 1;
        touched[std::size_t(c)] = 1;
    }

    std::unordered_map<int, std::vector<int>> members;
    for (int i = 0; i < dim; ++i) {
        if (touched[std::size_t(i)]) {
            members[uf.find(i)].push_back(i);
        }
    }

    double lowest = std::numeric_limits<double>::infinity();
    if (std::count(touched.begin(), touched.end(), 0) > 0) {
        lowest = 0.0;
    }

    std::unordered_map<int, std::pair<int, int>> local; // row -> (root, pos)
    std::unordered_map<int, Matrix> blocks;
    for (auto& [root, rows] : members) {
        for (int k = 0; k < int(rows.size()); ++k) {
            local[rows[std::size_t(k)]] = {root, k};
        }
        blocks[root] = Matrix::Zero(Eigen::Index(rows.size()),
                                    Eigen::Index(rows.size()));
    }
    for (const auto& [r, c, v] : entries) {
        const auto [root, i] = local[r];
        const int j = local[c].second;
        blocks[root](i, j) += v;
    }

    for (auto& [root, block] : blocks) {
        // Hermitian part; the solver only reads the lower triangle otherwise.
        Matrix herm = 0.5 * (block + block.adjoint());
        Eigen::SelfAdjointEigenSolver<Matrix> solver(herm,
                                                     Eigen::EigenvaluesOnly);
        lowest = std::min(lowest, solver.eigenvalues().minCoeff());
    }
    return dim == 0 ? 0.0 : lowest;
}

} // namespace qzb::detail
