#include "netcc/cocluster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>
#include <unordered_map>

#include "netcc/rng.hpp"
#include "netcc/simd.hpp"

namespace netcc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double xlog_ratio(double p, double denom) { return p > 0.0 ? p * std::log(p / denom) : 0.0; }

// The state of one alternating-minimization run.
class Engine {
public:
    Engine(const JointDistribution& p, std::size_t k, std::size_t l, std::vector<std::uint32_t> ra,
           std::vector<std::uint32_t> ca)
        : p_(p), k_(k), l_(l), ra_(std::move(ra)), ca_(std::move(ca)), joint_(k, l),
          mi_xy_(mutual_information(p)) {
        rebuild_joint();
    }

    double loss() const { return mi_xy_ - mutual_information(joint_); }
    const DenseMatrix& joint() const { return joint_; }
    const std::vector<std::uint32_t>& rows() const { return ra_; }
    const std::vector<std::uint32_t>& cols() const { return ca_; }
    std::vector<std::uint32_t>& rows() { return ra_; }
    std::vector<std::uint32_t>& cols() { return ca_; }

    // Reassigns every point on one side to its closest prototype under the
    // current prototypes (a batch update), repairs empty clusters, and
    // refreshes the cluster joint. Returns the number of changed assignments.
    std::size_t step(bool row_side) {
        const std::size_t n = row_side ? p_.rows() : p_.cols();
        const std::size_t own = row_side ? k_ : l_;
        const std::size_t other = row_side ? l_ : k_;
        auto& assign = row_side ? ra_ : ca_;
        const auto& other_assign = row_side ? ca_ : ra_;

        // neglog(c, o) = -log p(o | c) for the clusters c on this side.
        std::vector<double> mass(own, 0.0);
        for (std::size_t c = 0; c < own; ++c)
            for (std::size_t o = 0; o < other; ++o) mass[c] += row_side ? joint_(c, o) : joint_(o, c);
        std::vector<double> neglog(own * other, kInf);
        for (std::size_t c = 0; c < own; ++c) {
            if (!(mass[c] > 0.0)) continue;
            for (std::size_t o = 0; o < other; ++o) {
                const double v = row_side ? joint_(c, o) : joint_(o, c);
                if (v > 0.0) neglog[c * other + o] = -std::log(v / mass[c]);
            }
        }

        std::vector<double> profile(other), costs(own);
        std::vector<std::uint32_t> next(assign);
        std::vector<double> best_cost(n, 0.0);
        std::size_t changed = 0;
        for (std::size_t i = 0; i < n; ++i) {
            std::fill(profile.begin(), profile.end(), 0.0);
            for (const auto& e : row_side ? p_.row(i) : p_.col(i))
                profile[other_assign[row_side ? e.col : e.row]] += e.p;
            simd::masked_dot_rows(profile, neglog, costs);
            std::uint32_t best = assign[i];
            double best_value = kInf;
            for (std::size_t c = 0; c < own; ++c)
                if (costs[c] < best_value) {
                    best_value = costs[c];
                    best = static_cast<std::uint32_t>(c);
                }
            if (best_value == kInf) best_value = costs[assign[i]];
            best_cost[i] = best_value;
            if (best != assign[i]) ++changed;
            next[i] = best;
        }
        assign = std::move(next);
        changed += repair_empty(row_side, best_cost);
        rebuild_joint();
        return changed;
    }

private:
    // Moves into each empty cluster the point farthest (in KL) from its
    // current prototype, taken from a cluster that keeps at least one member.
    std::size_t repair_empty(bool row_side, const std::vector<double>& cost) {
        const std::size_t own = row_side ? k_ : l_;
        auto& assign = row_side ? ra_ : ca_;
        std::vector<std::size_t> size(own, 0);
        for (auto c : assign) ++size[c];
        if (std::find(size.begin(), size.end(), 0u) == size.end()) return 0;

        // KL(p(other|i) || q(other|c)) = sum p(o|i) log(p(o|i) / p(o|ohat)) + cost / p(i)
        const auto& other_assign = row_side ? ca_ : ra_;
        const auto marg = row_side ? p_.row_marginal() : p_.col_marginal();
        const auto other_marg = row_side ? p_.col_marginal() : p_.row_marginal();
        const std::size_t other = row_side ? l_ : k_;
        std::vector<double> other_cluster_mass(other, 0.0);
        for (std::size_t j = 0; j < other_marg.size(); ++j) other_cluster_mass[other_assign[j]] += other_marg[j];
        std::vector<double> divergence(assign.size());
        for (std::size_t i = 0; i < assign.size(); ++i) {
            double d = 0.0;
            for (const auto& e : row_side ? p_.row(i) : p_.col(i)) {
                const std::size_t j = row_side ? e.col : e.row;
                const double cond = e.p / marg[i];
                d += cond * std::log(cond / (other_marg[j] / other_cluster_mass[other_assign[j]]));
            }
            divergence[i] = d + cost[i] / marg[i];
        }

        std::size_t moved = 0;
        for (std::size_t c = 0; c < own; ++c) {
            if (size[c] != 0) continue;
            std::size_t pick = assign.size();
            for (std::size_t i = 0; i < assign.size(); ++i) {
                if (size[assign[i]] < 2) continue;
                if (pick == assign.size() || divergence[i] > divergence[pick]) pick = i;
            }
            if (pick == assign.size()) break;
            --size[assign[pick]];
            assign[pick] = static_cast<std::uint32_t>(c);
            size[c] = 1;
            divergence[pick] = -kInf;
            ++moved;
        }
        return moved;
    }

    void rebuild_joint() {
        DenseMatrix j(k_, l_);
        for (const auto& e : p_.entries()) j(ra_[e.row], ca_[e.col]) += e.p;
        joint_ = std::move(j);
    }

    const JointDistribution& p_;
    std::size_t k_, l_;
    std::vector<std::uint32_t> ra_, ca_;
    DenseMatrix joint_;
    double mi_xy_;
};

void check_shape(const JointDistribution& p, std::size_t k, std::size_t l) {
    if (k < 1 || l < 1) throw ContractError("cluster counts must be at least 1");
    if (k > p.rows()) throw ContractError("k exceeds the number of rows");
    if (l > p.cols()) throw ContractError("l exceeds the number of columns");
}

void check_assignment(std::span<const std::uint32_t> assign, std::size_t n, std::size_t clusters) {
    if (assign.size() != n) throw ContractError("assignment length does not match the matrix");
    for (auto c : assign)
        if (c >= clusters) throw ContractError("cluster index out of range");
}

// Index-aligned assignments for p, translating ids when p and the model differ.
std::pair<std::vector<std::uint32_t>, std::vector<std::uint32_t>> aligned(const JointDistribution& p,
                                                                          const CoclusterModel& model) {
    auto align = [](const std::vector<std::string>& ids, const std::vector<std::string>& model_ids,
                    const std::vector<std::uint32_t>& assign, const char* what) {
        if (ids == model_ids) return assign;
        std::unordered_map<std::string, std::uint32_t> index;
        for (std::size_t i = 0; i < model_ids.size(); ++i) index.emplace(model_ids[i], assign[i]);
        std::vector<std::uint32_t> out;
        out.reserve(ids.size());
        for (const auto& id : ids) {
            auto it = index.find(id);
            if (it == index.end()) throw ContractError(std::string(what) + " '" + id + "' is not in the model");
            out.push_back(it->second);
        }
        return out;
    };
    return {align(p.row_ids(), model.row_ids, model.row_assign, "row"),
            align(p.col_ids(), model.col_ids, model.col_assign, "column")};
}

}  // namespace

double mutual_information(const JointDistribution& p) {
    const auto px = p.row_marginal();
    const auto py = p.col_marginal();
    double total = 0.0;
    for (const auto& e : p.entries()) total += xlog_ratio(e.p, px[e.row] * py[e.col]);
    return std::max(0.0, total);
}

double mutual_information(const DenseMatrix& p) {
    std::vector<double> pr(p.rows(), 0.0), pc(p.cols(), 0.0);
    double total_mass = 0.0;
    for (std::size_t r = 0; r < p.rows(); ++r)
        for (std::size_t c = 0; c < p.cols(); ++c) {
            if (p(r, c) < 0.0) throw ContractError("negative probability");
            pr[r] += p(r, c);
            pc[c] += p(r, c);
            total_mass += p(r, c);
        }
    if (std::abs(total_mass - 1.0) > JointDistribution::kNormTolerance)
        throw ContractError("mutual_information: distribution does not sum to 1");
    double total = 0.0;
    for (std::size_t r = 0; r < p.rows(); ++r)
        for (std::size_t c = 0; c < p.cols(); ++c) total += xlog_ratio(p(r, c), pr[r] * pc[c]);
    return std::max(0.0, total);
}

double kl_divergence(std::span<const double> p, std::span<const double> q) {
    if (p.size() != q.size()) throw ContractError("kl_divergence: dimension mismatch");
    double total = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (!(p[i] > 0.0)) continue;
        if (!(q[i] > 0.0)) return kInf;
        total += p[i] * std::log(p[i] / q[i]);
    }
    return std::max(0.0, total);
}

AssociationMatrix association_matrix(const JointDistribution& p, std::span<const std::uint32_t> row_assign,
                                     std::size_t k, std::span<const std::uint32_t> col_assign, std::size_t l) {
    check_assignment(row_assign, p.rows(), k);
    check_assignment(col_assign, p.cols(), l);
    AssociationMatrix a(k, l);
    for (const auto& e : p.entries()) a(row_assign[e.row], col_assign[e.col]) += e.p;
    return a;
}

AssociationMatrix association_matrix(const JointDistribution& p, const CoclusterModel& model) {
    auto [ra, ca] = aligned(p, model);
    return association_matrix(p, ra, model.k, ca, model.l);
}

double loss(const JointDistribution& p, const CoclusterModel& model) {
    return mutual_information(p) - mutual_information(association_matrix(p, model));
}

Prototypes build_prototypes(const JointDistribution& p, const CoclusterModel& model) {
    auto [ra, ca] = aligned(p, model);
    const std::size_t k = model.k, l = model.l;
    std::vector<std::size_t> row_members(k, 0), col_members(l, 0);
    for (auto c : ra) ++row_members[c];
    for (auto c : ca) ++col_members[c];
    for (std::size_t c = 0; c < k; ++c)
        if (!row_members[c]) throw EmptyCluster(true, c);
    for (std::size_t c = 0; c < l; ++c)
        if (!col_members[c]) throw EmptyCluster(false, c);

    Prototypes out;
    out.cluster_joint = association_matrix(p, ra, k, ca, l);
    std::vector<double> pr(k, 0.0), pc(l, 0.0);
    for (std::size_t r = 0; r < k; ++r)
        for (std::size_t c = 0; c < l; ++c) {
            pr[r] += out.cluster_joint(r, c);
            pc[c] += out.cluster_joint(r, c);
        }
    const auto px = p.row_marginal();
    const auto py = p.col_marginal();
    out.row = DenseMatrix(k, p.cols());
    for (std::size_t r = 0; r < k; ++r)
        for (std::size_t y = 0; y < p.cols(); ++y)
            out.row(r, y) = (py[y] / pc[ca[y]]) * (out.cluster_joint(r, ca[y]) / pr[r]);
    out.col = DenseMatrix(l, p.rows());
    for (std::size_t c = 0; c < l; ++c)
        for (std::size_t x = 0; x < p.rows(); ++x)
            out.col(c, x) = (px[x] / pr[ra[x]]) * (out.cluster_joint(ra[x], c) / pc[c]);
    return out;
}

std::vector<std::uint32_t> random_surjective_assignment(std::size_t n, std::size_t clusters, std::uint64_t seed) {
    std::vector<std::uint32_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = static_cast<std::uint32_t>(i);
    Rng rng(seed);
    rng.shuffle(std::span(order));
    std::vector<std::uint32_t> assign(n);
    // One seed member per cluster, uniform labels for the rest.
    for (std::size_t i = 0; i < n; ++i)
        assign[order[i]] = static_cast<std::uint32_t>(i < clusters ? i : rng.below(clusters));
    return assign;
}

CoclusterModel cocluster_from(const JointDistribution& p, std::size_t k, std::size_t l,
                              std::vector<std::uint32_t> row_assign, std::vector<std::uint32_t> col_assign,
                              const CoclusterConfig& config, const HalfStepObserver& observer) {
    check_shape(p, k, l);
    check_assignment(row_assign, p.rows(), k);
    check_assignment(col_assign, p.cols(), l);

    Engine engine(p, k, l, std::move(row_assign), std::move(col_assign));
    CoclusterModel model;
    model.k = k;
    model.l = l;
    model.row_ids = p.row_ids();
    model.col_ids = p.col_ids();
    model.seed = config.seed;
    model.restarts = 1;
    model.loss_history.push_back(engine.loss());

    for (std::size_t it = 1; it <= config.tau_max; ++it) {
        const double before = model.loss_history.back();
        std::size_t changed = 0;
        for (bool row_side : {true, false}) {
            DenseMatrix step_joint;
            std::vector<std::uint32_t> step_rows, step_cols;
            if (observer) {
                step_joint = engine.joint();
                step_rows = engine.rows();
                step_cols = engine.cols();
            }
            changed += engine.step(row_side);
            model.loss_history.push_back(engine.loss());
            if (observer)
                observer(HalfStepEvent{row_side, it, engine.rows(), engine.cols(), &step_joint, step_rows,
                                       step_cols, model.loss_history.back()});
        }
        model.tau = it;
        if (config.early_stop && (changed == 0 || before - model.loss_history.back() < config.tol)) break;
    }
    model.row_assign = engine.rows();
    model.col_assign = engine.cols();
    return model;
}

CoclusterModel cocluster(const JointDistribution& p, std::size_t k, std::size_t l, const CoclusterConfig& config,
                         const HalfStepObserver& observer) {
    check_shape(p, k, l);
    const std::size_t restarts = std::max<std::size_t>(1, config.restarts);
    std::vector<CoclusterModel> runs(restarts);
    auto run_one = [&](std::size_t r) {
        const std::uint64_t stream = mix_seed(config.seed, r);
        runs[r] = cocluster_from(p, k, l, random_surjective_assignment(p.rows(), k, stream),
                                 random_surjective_assignment(p.cols(), l, mix_seed(stream, 1)), config, observer);
    };
    const std::size_t threads = observer ? 1 : std::min(std::max<std::size_t>(1, config.threads), restarts);
    if (threads == 1) {
        for (std::size_t r = 0; r < restarts; ++r) run_one(r);
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < threads; ++t)
            pool.emplace_back([&, t] {
                for (std::size_t r = t; r < restarts; r += threads) run_one(r);
            });
    }

    std::size_t best = 0;
    for (std::size_t r = 1; r < restarts; ++r)
        if (runs[r].final_loss() < runs[best].final_loss()) best = r;
    CoclusterModel out = std::move(runs[best]);
    out.seed = config.seed;
    out.restarts = restarts;
    out.best_restart = best;
    return out;
}

std::string column_cluster_label(std::size_t c) {
    std::string label;
    ++c;
    while (c > 0) {
        --c;
        label.insert(label.begin(), static_cast<char>('A' + c % 26));
        c /= 26;
    }
    return label;
}

}  // namespace netcc
