#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <vector>

#include "rlsp/mdp.hpp"
#include "rlsp/planning.hpp"

namespace rlsp {

// Fcal[t][s] = expected sum of feature vectors over states s_t..s_H when the
// policy is followed from state s at time t (the state at every remaining
// timestep contributes, including s itself and the final state).
struct FeatureExpectations {
    int horizon = 0;
    int num_states = 0;
    int num_features = 0;
    std::vector<double> data;  // (horizon+1) * S * F

    const double* row(int t, int s) const {
        return data.data() + ((size_t)t * num_states + s) * num_features;
    }
    double* row(int t, int s) {
        return data.data() + ((size_t)t * num_states + s) * num_features;
    }
    Eigen::VectorXd vec(int t, int s) const {
        return Eigen::Map<const Eigen::VectorXd>(row(t, s), num_features);
    }
};

// Backward recursion:
//   Fcal[H][s] = f(s)
//   Fcal[t][s] = f(s) + sum_a pi_t(a|s) sum_s' T(s'|s,a) Fcal[t+1][s']
inline FeatureExpectations feature_expectations(const TabularMdp& mdp,
                                                const SoftPolicy& policy) {
    const int S = mdp.num_states(), A = mdp.num_actions(), F = mdp.num_features();
    const int H = policy.horizon;
    if (policy.num_states != S || policy.num_actions != A)
        throw std::invalid_argument("feature_expectations: policy does not match mdp");

    FeatureExpectations fe;
    fe.horizon = H;
    fe.num_states = S;
    fe.num_features = F;
    fe.data.assign((size_t)(H + 1) * S * F, 0.0);

    const int* nx = mdp.next().data();
    const double* pr = mdp.prob().data();
    const FeatureMatrix& feat = mdp.features();

    for (int s = 0; s < S; ++s) {
        double* out = fe.row(H, s);
        for (int f = 0; f < F; ++f) out[f] = feat(s, f);
    }
    for (int t = H - 1; t >= 0; --t) {
        const double* nextplane = fe.data.data() + (size_t)(t + 1) * S * F;
        for (int s = 0; s < S; ++s) {
            double* out = fe.row(t, s);
            for (int f = 0; f < F; ++f) out[f] = feat(s, f);
            const double* prow = policy.row(t, s);
            for (int a = 0; a < A; ++a) {
                double w = prow[a];
                if (w == 0.0) continue;
                for (size_t i = mdp.row_begin(s, a); i < mdp.row_end(s, a); ++i) {
                    double wp = w * pr[i];
                    const double* src = nextplane + (size_t)nx[i] * F;
                    for (int f = 0; f < F; ++f) out[f] += wp * src[f];
                }
            }
        }
    }
    return fe;
}

// Gradient of ln p(trajectory | theta) with respect to theta, where the
// trajectory likelihood is induced by the soft policy for theta:
//
//   sum_{t=0}^{H-1} [ f(s_t) + E_{s'~T(.|s_t,a_t)} Fcal[t+1][s'] - Fcal[t][s_t] ]
//
// Requires every taken transition to be feasible; an infeasible step is a
// logic error here (unlike trajectory_log_prob's -inf convention) because
// the gradient of an impossible event is undefined.
inline Eigen::VectorXd trajectory_gradient(const TabularMdp& mdp, const SoftPolicy& policy,
                                           const Trajectory& traj,
                                           const FeatureExpectations& fcal) {
    traj.validate(mdp);
    if (traj.horizon() != policy.horizon || fcal.horizon != policy.horizon)
        throw std::invalid_argument("trajectory_gradient: horizon mismatch");
    const int F = mdp.num_features();
    const int* nx = mdp.next().data();
    const double* pr = mdp.prob().data();
    const FeatureMatrix& feat = mdp.features();

    Eigen::VectorXd grad = Eigen::VectorXd::Zero(F);
    for (int t = 0; t < traj.horizon(); ++t) {
        int s = traj.states[t], a = traj.actions[t];
        if (mdp.transition(s, a, traj.states[t + 1]) <= 0.0)
            throw std::invalid_argument("trajectory_gradient: infeasible transition in trajectory");
        for (int f = 0; f < F; ++f) grad[f] += feat(s, f) - fcal.row(t, s)[f];
        for (size_t i = mdp.row_begin(s, a); i < mdp.row_end(s, a); ++i) {
            const double* src = fcal.row(t + 1, nx[i]);
            for (int f = 0; f < F; ++f) grad[f] += pr[i] * src[f];
        }
    }
    return grad;
}

}  // namespace rlsp
