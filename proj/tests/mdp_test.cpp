#include "rlsp/mdp.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "support.hpp"

using namespace rlsp;

TEST(TabularMdp, Chain3Basics) {
    TabularMdp m = make_chain3();
    EXPECT_EQ(m.num_states(), 3);
    EXPECT_EQ(m.num_actions(), 2);
    EXPECT_EQ(m.num_features(), 3);
    EXPECT_TRUE(m.is_deterministic());

    EXPECT_DOUBLE_EQ(m.transition(0, 0, 0), 1.0);
    EXPECT_DOUBLE_EQ(m.transition(0, 1, 1), 1.0);
    EXPECT_DOUBLE_EQ(m.transition(0, 1, 2), 0.0);
    EXPECT_DOUBLE_EQ(m.transition(2, 1, 2), 1.0);  // right saturates at the end

    Eigen::VectorXd theta(3);
    theta << -1.0, 0.5, 2.0;
    Eigen::VectorXd r = m.state_rewards(theta);
    EXPECT_DOUBLE_EQ(r[0], -1.0);
    EXPECT_DOUBLE_EQ(r[1], 0.5);
    EXPECT_DOUBLE_EQ(r[2], 2.0);
}

TEST(TabularMdp, RejectsMalformedInput) {
    std::vector<std::vector<Successors>> t(2, std::vector<Successors>(1));
    t[0][0] = {{0, 0.5}, {1, 0.4}};  // sums to 0.9
    t[1][0] = {{1, 1.0}};
    FeatureMatrix f = FeatureMatrix::Zero(2, 1);
    EXPECT_THROW(TabularMdp(2, 1, t, f), std::invalid_argument);

    t[0][0] = {{0, 1.5}, {1, -0.5}};  // negative entry
    EXPECT_THROW(TabularMdp(2, 1, t, f), std::invalid_argument);

    t[0][0] = {{5, 1.0}};  // successor out of range
    EXPECT_THROW(TabularMdp(2, 1, t, f), std::invalid_argument);

    t[0][0] = {{0, 1.0}};
    EXPECT_THROW(TabularMdp(2, 1, t, FeatureMatrix::Zero(3, 1)), std::invalid_argument);
    EXPECT_THROW(TabularMdp(2, 1, t, f, {"only-one-name"}), std::invalid_argument);
}

TEST(TabularMdp, JsonRoundTrip) {
    TabularMdp m = testsupport::random_mdp(7, 5, 3, 4);
    TabularMdp back = TabularMdp::from_json(m.to_json());
    EXPECT_EQ(back.num_states(), m.num_states());
    EXPECT_EQ(back.num_actions(), m.num_actions());
    EXPECT_EQ(back.to_json(), m.to_json());
}

TEST(TabularMdp, JsonAcceptsDenseRows) {
    nlohmann::json j;
    j["num_states"] = 2;
    j["num_actions"] = 1;
    // One dense row, one sparse row; both describe valid distributions.
    j["transitions"] = {{{0.25, 0.75}}, {{{1, 1.0}}}};
    j["features"] = {{1.0, 0.0}, {0.0, 1.0}};
    j["state_names"] = {"a", "b"};
    TabularMdp m = TabularMdp::from_json(j);
    EXPECT_DOUBLE_EQ(m.transition(0, 0, 0), 0.25);
    EXPECT_DOUBLE_EQ(m.transition(0, 0, 1), 0.75);
    EXPECT_DOUBLE_EQ(m.transition(1, 0, 1), 1.0);
    EXPECT_EQ(m.state_names()[1], "b");
}

TEST(TabularMdp, RandomRowsAreDistributions) {
    for (uint64_t seed = 0; seed < 20; ++seed) {
        TabularMdp m = testsupport::random_mdp(seed, 6, 3, 4);
        for (int s = 0; s < m.num_states(); ++s)
            for (int a = 0; a < m.num_actions(); ++a) {
                double total = 0.0;
                for (size_t i = m.row_begin(s, a); i < m.row_end(s, a); ++i) {
                    EXPECT_GT(m.prob()[i], 0.0);
                    total += m.prob()[i];
                }
                EXPECT_NEAR(total, 1.0, 1e-12);
            }
    }
}

TEST(Distributions, Validators) {
    EXPECT_NO_THROW(validate_distribution(uniform_distribution(4), 4));
    EXPECT_NO_THROW(validate_distribution(delta_distribution(4, 2), 4));
    EXPECT_THROW(validate_distribution(delta_distribution(4, 2), 3), std::invalid_argument);

    Eigen::VectorXd bad = Eigen::VectorXd::Zero(3);
    bad << 0.5, 0.6, 0.0;
    EXPECT_THROW(validate_distribution(bad, 3), std::invalid_argument);
    bad << 1.5, -0.5, 0.0;
    EXPECT_THROW(validate_distribution(bad, 3), std::invalid_argument);
    EXPECT_THROW(delta_distribution(3, 5), std::invalid_argument);
}

TEST(Trajectory, Validation) {
    TabularMdp m = make_chain3();
    Trajectory ok{{0, 1}, {1, 0}};
    EXPECT_NO_THROW(ok.validate(m));
    EXPECT_EQ(ok.horizon(), 1);

    Trajectory ragged{{0, 1}, {1}};
    EXPECT_THROW(ragged.validate(m), std::invalid_argument);
    Trajectory oob{{0, 9}, {1, 0}};
    EXPECT_THROW(oob.validate(m), std::invalid_argument);
    Trajectory bad_action{{0, 1}, {1, 7}};
    EXPECT_THROW(bad_action.validate(m), std::invalid_argument);
}
