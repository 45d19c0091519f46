#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "journeys/cooccurrence.hpp"
#include "journeys/error.hpp"
#include "journeys/random.hpp"

namespace journeys {

// Row-aligned ids and dense vectors.
struct EmbeddingTable {
    std::vector<std::string> ids;
    std::vector<std::vector<double>> vectors;

    std::size_t dim() const { return vectors.empty() ? 0 : vectors.front().size(); }
};

struct Factorization {
    EmbeddingTable embeddings;
    // ||D - Q Q^T D Q Q^T||_F^2 after each subspace iteration.
    std::vector<double> residuals;
};

/// Rank-`dim` symmetric factorization of ln(1 + counts) by seeded subspace
/// iteration followed by a Rayleigh-Ritz step. Item i's embedding is row i
/// of V * sqrt(|Lambda|), taking the `dim` eigenpairs of largest magnitude.
inline Factorization factorize_with_trace(const CoocMatrix& m, std::size_t dim, std::size_t iters,
                                          std::uint64_t seed) {
    const std::size_t n = m.size();
    if (dim == 0) throw InvalidArgument("factorize: dim must be >= 1");
    if (iters == 0) throw InvalidArgument("factorize: iters must be >= 1");
    if (dim > n) {
        throw InvalidArgument("factorize: dim " + std::to_string(dim) + " exceeds item count " +
                              std::to_string(n));
    }
    const auto N = static_cast<Eigen::Index>(n);
    const auto R = static_cast<Eigen::Index>(dim);

    Eigen::MatrixXd damped = Eigen::MatrixXd::Zero(N, N);
    for (std::size_t i = 0; i < n; ++i) {
        for (const auto& [j, c] : m.row(i)) {
            damped(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                std::log1p(static_cast<double>(c));
        }
    }
    const double total_sq = damped.squaredNorm();

    Rng rng(seed);
    Eigen::MatrixXd basis(N, R);
    for (Eigen::Index c = 0; c < R; ++c) {
        for (Eigen::Index r = 0; r < N; ++r) basis(r, c) = standard_normal(rng);
    }

    const auto orthonormalize = [&](const Eigen::MatrixXd& a) {
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
        return Eigen::MatrixXd(qr.householderQ() * Eigen::MatrixXd::Identity(N, R));
    };

    Factorization out;
    basis = orthonormalize(basis);
    Eigen::MatrixXd projected;
    for (std::size_t it = 0; it < iters; ++it) {
        basis = orthonormalize(damped * basis);
        projected = basis.transpose() * damped * basis;
        out.residuals.push_back(std::max(0.0, total_sq - projected.squaredNorm()));
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(projected);
    const Eigen::VectorXd& values = eig.eigenvalues();
    std::vector<Eigen::Index> order(static_cast<std::size_t>(R));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        return std::abs(values(a)) > std::abs(values(b));
    });

    Eigen::MatrixXd factors(N, R);
    for (Eigen::Index c = 0; c < R; ++c) {
        const Eigen::Index src = order[static_cast<std::size_t>(c)];
        Eigen::VectorXd column = basis * eig.eigenvectors().col(src);
        // Pin the eigenvector sign: largest-magnitude entry positive.
        Eigen::Index arg = 0;
        column.cwiseAbs().maxCoeff(&arg);
        if (column(arg) < 0.0) column = -column;
        factors.col(c) = column * std::sqrt(std::abs(values(src)));
    }

    out.embeddings.ids = m.ids();
    out.embeddings.vectors.assign(n, std::vector<double>(dim, 0.0));
    for (Eigen::Index r = 0; r < N; ++r) {
        for (Eigen::Index c = 0; c < R; ++c) {
            out.embeddings.vectors[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] =
                factors(r, c);
        }
    }
    return out;
}

inline EmbeddingTable factorize(const CoocMatrix& m, std::size_t dim, std::size_t iters,
                                std::uint64_t seed) {
    return factorize_with_trace(m, dim, iters, seed).embeddings;
}

}  // namespace journeys
