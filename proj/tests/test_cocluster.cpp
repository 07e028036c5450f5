#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <set>

#include "netcc/cocluster.hpp"
#include "netcc/error.hpp"
#include "netcc/synth.hpp"
#include "support.hpp"

using namespace netcc;
using netcc::testing::oracle_association;
using netcc::testing::oracle_mi;

namespace {

const double kLn2 = std::numbers::ln2;

CoclusterModel model_for(const JointDistribution& p, std::vector<std::uint32_t> ra, std::size_t k,
                         std::vector<std::uint32_t> ca, std::size_t l) {
    CoclusterModel m;
    m.k = k;
    m.l = l;
    m.row_ids = p.row_ids();
    m.col_ids = p.col_ids();
    m.row_assign = std::move(ra);
    m.col_assign = std::move(ca);
    return m;
}

std::vector<std::uint32_t> identity(std::size_t n) {
    std::vector<std::uint32_t> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = static_cast<std::uint32_t>(i);
    return v;
}

DenseMatrix two_blocks() {
    return DenseMatrix{{0.125, 0.125, 0, 0}, {0.125, 0.125, 0, 0}, {0, 0, 0.125, 0.125}, {0, 0, 0.125, 0.125}};
}

CoclusterConfig quick(std::size_t restarts = 8, std::uint64_t seed = 1) {
    CoclusterConfig c;
    c.restarts = restarts;
    c.seed = seed;
    return c;
}

}  // namespace

TEST_CASE("mutual information") {
    CHECK(mutual_information(DenseMatrix{{0.25, 0.25}, {0.25, 0.25}}) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(mutual_information(DenseMatrix{{0.5, 0}, {0, 0.5}}) == doctest::Approx(kLn2).epsilon(1e-12));
    const DenseMatrix p{{0.3, 0.2}, {0.1, 0.4}};
    CHECK(mutual_information(p) == doctest::Approx(oracle_mi(p)).epsilon(1e-12));
    CHECK(mutual_information(JointDistribution::from_dense(p)) == doctest::Approx(oracle_mi(p)).epsilon(1e-12));
    CHECK_THROWS_AS(mutual_information(DenseMatrix{{0.5, 0.2}}), ContractError);

    Rng rng(61);
    for (int t = 0; t < 100; ++t) {
        const auto p = netcc::testing::random_joint(rng, 1 + rng.below(10), 1 + rng.below(10), 0.4);
        CHECK(mutual_information(p) == doctest::Approx(oracle_mi(p.to_dense())).epsilon(1e-10));
        CHECK(mutual_information(p) >= 0.0);
    }
}

TEST_CASE("relative entropy") {
    const std::vector<double> p{0.2, 0.3, 0.5};
    CHECK(kl_divergence(p, p) == 0.0);
    CHECK(kl_divergence(std::vector<double>{1, 0}, std::vector<double>{0.5, 0.5}) ==
          doctest::Approx(kLn2).epsilon(1e-12));
    CHECK(std::isinf(kl_divergence(std::vector<double>{1, 0}, std::vector<double>{0, 1})));
    CHECK_THROWS_AS(kl_divergence(std::vector<double>{1}, std::vector<double>{0.5, 0.5}), ContractError);
}

TEST_CASE("prototypes") {
    const auto p = JointDistribution::from_dense(two_blocks());
    auto pr = build_prototypes(p, model_for(p, {0, 0, 1, 1}, 2, {0, 0, 1, 1}, 2));
    CHECK(pr.row(0, 0) == doctest::Approx(0.5));
    CHECK(pr.row(0, 1) == doctest::Approx(0.5));
    CHECK(pr.row(0, 2) == 0.0);
    CHECK(pr.row(1, 3) == doctest::Approx(0.5));
    CHECK(pr.cluster_joint == DenseMatrix{{0.5, 0}, {0, 0.5}});

    Rng rng(67);
    const auto q = netcc::testing::random_joint(rng, 3, 3, 0.7);
    auto single = build_prototypes(q, model_for(q, {0, 0, 0}, 1, {0, 0, 0}, 1));
    for (std::size_t y = 0; y < 3; ++y) CHECK(single.row(0, y) == doctest::Approx(q.col_marginal()[y]).epsilon(1e-12));

    // Direct formula on a fixed assignment.
    const std::vector<std::uint32_t> ra{0, 1, 1}, ca{1, 0, 1};
    auto fixed = build_prototypes(q, model_for(q, ra, 2, ca, 2));
    const auto d = q.to_dense();
    const auto a = oracle_association(d, ra, 2, ca, 2);
    for (std::size_t r = 0; r < 2; ++r) {
        const double row_mass = a(r, 0) + a(r, 1);
        for (std::size_t y = 0; y < 3; ++y) {
            const double col_mass = a(0, ca[y]) + a(1, ca[y]);
            const double expected = (q.col_marginal()[y] / col_mass) * (a(r, ca[y]) / row_mass);
            CHECK(fixed.row(r, y) == doctest::Approx(expected).epsilon(1e-12));
        }
    }
    CHECK_THROWS_AS(build_prototypes(q, model_for(q, {0, 0, 0}, 2, ca, 2)), EmptyCluster);
}

TEST_CASE("prototype rows sum to one at every half-step") {
    Rng rng(71);
    for (int t = 0; t < 30; ++t) {
        const auto p = netcc::testing::random_joint(rng, 5 + rng.below(20), 5 + rng.below(20), 0.3);
        const std::size_t k = 1 + rng.below(4), l = 1 + rng.below(4);
        cocluster(p, k, l, quick(2, t), [&](const HalfStepEvent& ev) {
            CoclusterModel m = model_for(p, {ev.row_assign.begin(), ev.row_assign.end()}, k,
                                         {ev.col_assign.begin(), ev.col_assign.end()}, l);
            const auto pr = build_prototypes(p, m);
            for (std::size_t r = 0; r < k; ++r) {
                double s = 0;
                for (double v : pr.row.row(r)) s += v;
                CHECK(s == doctest::Approx(1.0).epsilon(1e-9));
            }
            for (std::size_t c = 0; c < l; ++c) {
                double s = 0;
                for (double v : pr.col.row(c)) s += v;
                CHECK(s == doctest::Approx(1.0).epsilon(1e-9));
            }
            CHECK(pr.cluster_joint.sum() == doctest::Approx(1.0).epsilon(1e-9));
        });
    }
}

TEST_CASE("planted blocks are recovered with zero loss") {
    const auto p = JointDistribution::from_dense(two_blocks());
    const auto m = cocluster(p, 2, 2, quick());
    CHECK(m.final_loss() == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(m.row_assign[0] == m.row_assign[1]);
    CHECK(m.row_assign[2] == m.row_assign[3]);
    CHECK(m.row_assign[0] != m.row_assign[2]);
    CHECK(m.col_assign[0] == m.col_assign[1]);
    CHECK(m.col_assign[0] != m.col_assign[3]);
    auto a = association_matrix(p, m);
    CHECK(a(m.row_assign[0], m.col_assign[0]) == doctest::Approx(0.5));
    CHECK(a(m.row_assign[0], m.col_assign[3]) == 0.0);

    Rng rng(73);
    const auto q = netcc::testing::random_joint(rng, 6, 5);
    const auto full = cocluster(q, 6, 5, quick(1));
    CHECK(std::abs(full.final_loss()) <= 1e-12);
}

TEST_CASE("restarts reach the exhaustive optimum on 6x6") {
    PlantedSpec spec;
    spec.k = spec.l = 2;
    spec.row_sizes = {3, 3};
    spec.col_sizes = {3, 3};
    spec.block = default_block(spec.row_sizes, 2);
    spec.noise = 0.1;
    int checked = 0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        spec.seed = seed;
        auto truth = gen_planted_joint(spec);
        // Perturb so the optimum is not degenerate.
        Rng rng(seed);
        auto d = truth.p.to_dense();
        for (double& v : d.values()) v *= rng.uniform(0.5, 1.5);
        const auto p = JointDistribution::from_dense(d);
        const auto brute = brute_force_cocluster(p.to_dense(), 2, 2);
        auto cfg = quick(32, seed);
        const auto m = cocluster(p, 2, 2, cfg);
        CHECK(m.final_loss() == doctest::Approx(brute.loss).epsilon(1e-10));
        CHECK(m.final_loss() >= brute.loss - 1e-12);
        ++checked;
    }
    CHECK(checked == 5);
}

TEST_CASE("loss and association against oracles") {
    Rng rng(79);
    for (int t = 0; t < 100; ++t) {
        const std::size_t n = 2 + rng.below(10), m = 2 + rng.below(10);
        const auto p = netcc::testing::random_joint(rng, n, m, 0.4);
        const std::size_t k = 1 + rng.below(n), l = 1 + rng.below(m);
        const auto ra = netcc::testing::random_labels(rng, n, k);
        const auto ca = netcc::testing::random_labels(rng, m, l);
        const auto model = model_for(p, ra, k, ca, l);
        const auto d = p.to_dense();
        const auto a = oracle_association(d, ra, k, ca, l);
        const auto got = association_matrix(p, model);
        for (std::size_t r = 0; r < k; ++r)
            for (std::size_t c = 0; c < l; ++c) CHECK(got(r, c) == doctest::Approx(a(r, c)).epsilon(1e-12));
        CHECK(got.sum() == doctest::Approx(1.0).epsilon(1e-9));
        const double expected = oracle_mi(d) - oracle_mi(a);
        CHECK(loss(p, model) == doctest::Approx(expected).epsilon(1e-10));
        // Data processing inequality.
        CHECK(loss(p, model) >= -1e-12);
    }
    const auto p = JointDistribution::from_dense(DenseMatrix{{0.3, 0.2}, {0.1, 0.4}});
    CHECK(loss(p, model_for(p, identity(2), 2, identity(2), 2)) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(loss(p, model_for(p, {0, 0}, 1, {0, 0}, 1)) == doctest::Approx(mutual_information(p)).epsilon(1e-14));
    CHECK(association_matrix(p, model_for(p, {0, 0}, 1, {0, 0}, 1))(0, 0) == doctest::Approx(1.0));
}

TEST_CASE("association follows ids when the model covers a different ordering") {
    const auto p = JointDistribution::from_dense(two_blocks(), {"a", "b", "c", "d"}, {"w", "x", "y", "z"});
    CoclusterModel m;
    m.k = m.l = 2;
    m.row_ids = {"d", "c", "b", "a", "extra"};
    m.row_assign = {1, 1, 0, 0, 0};
    m.col_ids = {"z", "y", "x", "w"};
    m.col_assign = {1, 1, 0, 0};
    CHECK(association_matrix(p, m) == DenseMatrix{{0.5, 0}, {0, 0.5}});
    m.row_ids[0] = "q";
    CHECK_THROWS_AS(association_matrix(p, m), ContractError);
}

TEST_CASE("loss history never increases") {
    Rng rng(83);
    for (int t = 0; t < 200; ++t) {
        const std::size_t n = 2 + rng.below(40), m = 2 + rng.below(40);
        const auto p = netcc::testing::random_joint(rng, n, m, rng.uniform(0.05, 0.8));
        const std::size_t k = 1 + rng.below(std::min<std::size_t>(n, 6)), l = 1 + rng.below(std::min<std::size_t>(m, 6));
        auto cfg = quick(2, t);
        const auto model = cocluster(p, k, l, cfg);
        for (std::size_t i = 1; i < model.loss_history.size(); ++i)
            CHECK(model.loss_history[i] <= model.loss_history[i - 1] + 1e-12);
        CHECK(model.loss_history.size() == 1 + 2 * model.tau);
        CHECK(model.final_loss() == doctest::Approx(loss(p, model)).epsilon(1e-12));
        std::vector<std::size_t> rs(k, 0), cs(l, 0);
        for (auto c : model.row_assign) ++rs[c];
        for (auto c : model.col_assign) ++cs[c];
        for (auto s : rs) CHECK(s > 0);
        for (auto s : cs) CHECK(s > 0);
    }
}

TEST_CASE("each half-step picks the closest prototype for every point") {
    Rng rng(89);
    const double inf = std::numeric_limits<double>::infinity();
    std::size_t steps = 0;
    for (int t = 0; t < 40; ++t) {
        const std::size_t n = 3 + rng.below(6), m = 3 + rng.below(6);
        const auto p = netcc::testing::random_joint(rng, n, m, 0.5);
        const std::size_t k = 2 + rng.below(2), l = 2 + rng.below(2);
        const auto d = p.to_dense();
        cocluster(p, k, l, quick(1, t), [&](const HalfStepEvent& ev) {
            const auto& j = *ev.step_cluster_joint;
            const bool rows = ev.row_step;
            const std::size_t count = rows ? n : m, own = rows ? k : l, other = rows ? l : k;
            const auto& other_assign = rows ? ev.step_col_assign : ev.step_row_assign;
            const auto other_marg = rows ? p.col_marginal() : p.row_marginal();
            const auto marg = rows ? p.row_marginal() : p.col_marginal();
            std::vector<double> other_mass(other, 0.0), own_mass(own, 0.0);
            for (std::size_t r = 0; r < j.rows(); ++r)
                for (std::size_t c = 0; c < j.cols(); ++c) {
                    (rows ? own_mass[r] : own_mass[c]) += j(r, c);
                    (rows ? other_mass[c] : other_mass[r]) += j(r, c);
                }
            std::vector<std::vector<double>> cost(count, std::vector<double>(own, 0.0));
            std::vector<std::uint32_t> argmin(count);
            for (std::size_t i = 0; i < count; ++i) {
                for (std::size_t c = 0; c < own; ++c) {
                    std::vector<double> pi(other_marg.size()), q(other_marg.size());
                    for (std::size_t y = 0; y < other_marg.size(); ++y) {
                        pi[y] = (rows ? d(i, y) : d(y, i)) / marg[i];
                        const double block = rows ? j(c, other_assign[y]) : j(other_assign[y], c);
                        q[y] = own_mass[c] > 0 ? other_marg[y] / other_mass[other_assign[y]] * block / own_mass[c] : 0.0;
                    }
                    cost[i][c] = kl_divergence(pi, q);
                }
                argmin[i] = 0;
                for (std::uint32_t c = 1; c < own; ++c)
                    if (cost[i][c] < cost[i][argmin[i]]) argmin[i] = c;
            }
            std::vector<std::size_t> size(own, 0);
            for (auto c : argmin) ++size[c];
            if (std::find(size.begin(), size.end(), 0u) != size.end()) return;  // repair moved points
            const auto& chosen = rows ? ev.row_assign : ev.col_assign;
            for (std::size_t i = 0; i < count; ++i) {
                const double best = cost[i][argmin[i]];
                if (best == inf) continue;
                CHECK(cost[i][chosen[i]] <= best + 1e-12);
            }
            ++steps;
        });
    }
    CHECK(steps > 40);
}

TEST_CASE("results do not depend on thread count") {
    Rng rng(97);
    const auto p = netcc::testing::random_sparse_joint(rng, 300, 120, 3000);
    auto cfg = quick(8, 5);
    cfg.threads = 1;
    const auto a = cocluster(p, 6, 5, cfg);
    cfg.threads = 4;
    const auto b = cocluster(p, 6, 5, cfg);
    CHECK(a == b);
    CHECK(a == cocluster(p, 6, 5, cfg));
    cfg.seed = 6;
    CHECK(!(cocluster(p, 6, 5, cfg) == a));
}

TEST_CASE("best restart wins and ties keep the earlier one") {
    Rng rng(101);
    const auto p = netcc::testing::random_joint(rng, 20, 20, 0.3);
    auto cfg = quick(6, 9);
    const auto best = cocluster(p, 3, 3, cfg);
    for (std::size_t r = 0; r < 6; ++r) {
        const auto stream = mix_seed(9, r);
        auto one = cocluster_from(p, 3, 3, random_surjective_assignment(20, 3, stream),
                                  random_surjective_assignment(20, 3, mix_seed(stream, 1)), cfg);
        CHECK(best.final_loss() <= one.final_loss());
        if (r < best.best_restart) CHECK(one.final_loss() > best.final_loss());
    }
}

TEST_CASE("random initial assignment covers every cluster") {
    CHECK(random_surjective_assignment(10, 3, 4) == random_surjective_assignment(10, 3, 4));
    CHECK(random_surjective_assignment(10, 10, 1).size() == 10);
    std::set<std::vector<int>> shapes;
    for (std::uint64_t seed = 0; seed < 300; ++seed) {
        const auto a = random_surjective_assignment(6, 2, seed);
        std::vector<int> size(2, 0);
        for (auto c : a) ++size[c];
        CHECK(size[0] > 0);
        CHECK(size[1] > 0);
        shapes.insert(size);
    }
    // Uneven splits such as 5 + 1 are reachable, not only the balanced one.
    CHECK(shapes.count({5, 1}) == 1);
    CHECK(shapes.count({1, 5}) == 1);
    CHECK(shapes.count({3, 3}) == 1);
}

TEST_CASE("contract errors") {
    const auto p = JointDistribution::from_dense(two_blocks());
    CHECK_THROWS_AS(cocluster(p, 5, 2), ContractError);
    CHECK_THROWS_AS(cocluster(p, 2, 5), ContractError);
    CHECK_THROWS_AS(cocluster(p, 0, 2), ContractError);
    CHECK_THROWS_AS(cocluster_from(p, 2, 2, {0, 1, 0}, {0, 1, 0, 1}, {}), ContractError);
    CHECK_THROWS_AS(cocluster_from(p, 2, 2, {0, 1, 0, 2}, {0, 1, 0, 1}, {}), ContractError);
}
