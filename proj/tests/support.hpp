#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>
#include <vector>

#include "rlsp/mdp.hpp"

namespace testsupport {

// Seeded random MDP with sparse rows. Each (s, a) gets 1-3 distinct
// successors (exactly 1 when deterministic) whose probabilities sum to 1
// exactly: the last entry is computed as 1 minus the rest.
inline rlsp::TabularMdp random_mdp(uint64_t seed, int S, int A, int F,
                                   bool deterministic = false) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.1, 1.0);
    std::uniform_real_distribution<double> feat(-1.0, 1.0);

    std::vector<std::vector<rlsp::Successors>> trans(S, std::vector<rlsp::Successors>(A));
    for (int s = 0; s < S; ++s)
        for (int a = 0; a < A; ++a) {
            int k = deterministic ? 1 : 1 + (int)(rng() % 3);
            std::vector<int> succ;
            while ((int)succ.size() < k) {
                int c = (int)(rng() % S);
                bool dup = false;
                for (int x : succ) dup |= (x == c);
                if (!dup) succ.push_back(c);
            }
            if (k == 1) {
                trans[s][a] = {{succ[0], 1.0}};
            } else {
                std::vector<double> w(k);
                double total = 0.0;
                for (int i = 0; i < k; ++i) total += (w[i] = unif(rng));
                double acc = 0.0;
                for (int i = 0; i + 1 < k; ++i) {
                    w[i] /= total;
                    acc += w[i];
                    trans[s][a].emplace_back(succ[i], w[i]);
                }
                trans[s][a].emplace_back(succ[k - 1], 1.0 - acc);
            }
        }

    rlsp::FeatureMatrix features(S, F);
    for (int s = 0; s < S; ++s)
        for (int f = 0; f < F; ++f) features(s, f) = feat(rng);
    return rlsp::TabularMdp(S, A, std::move(trans), std::move(features));
}

inline Eigen::VectorXd random_theta(uint64_t seed, int F, double scale = 1.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, scale);
    Eigen::VectorXd theta(F);
    for (int f = 0; f < F; ++f) theta[f] = normal(rng);
    return theta;
}

// Central finite differences of a scalar function of theta.
template <typename Fn>
inline Eigen::VectorXd central_fd(Fn&& fn, const Eigen::VectorXd& theta, double h = 1e-5) {
    Eigen::VectorXd grad(theta.size());
    Eigen::VectorXd t = theta;
    for (int i = 0; i < theta.size(); ++i) {
        t[i] = theta[i] + h;
        double hi = fn(t);
        t[i] = theta[i] - h;
        double lo = fn(t);
        t[i] = theta[i];
        grad[i] = (hi - lo) / (2.0 * h);
    }
    return grad;
}

// Sup-norm error relative to the reference's scale, floored at 1 so that
// near-zero references degrade gracefully to absolute error.
inline double rel_err(const Eigen::VectorXd& got, const Eigen::VectorXd& want) {
    double scale = std::max(1.0, want.lpNorm<Eigen::Infinity>());
    return (got - want).lpNorm<Eigen::Infinity>() / scale;
}

inline double rel_err(double got, double want) {
    return std::abs(got - want) / std::max(1.0, std::abs(want));
}

}  // namespace testsupport
