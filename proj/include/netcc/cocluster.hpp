#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "netcc/dense.hpp"
#include "netcc/pipeline.hpp"
#include "netcc/provenance.hpp"

namespace netcc {

// Hard row and column clusterings of a joint distribution.
struct CoclusterModel {
    std::size_t k = 0;
    std::size_t l = 0;
    std::vector<std::string> row_ids;
    std::vector<std::string> col_ids;
    std::vector<std::uint32_t> row_assign;  // row index -> row cluster
    std::vector<std::uint32_t> col_assign;  // column index -> column cluster
    std::size_t tau = 0;                    // full iterations executed
    std::vector<double> loss_history;       // initial loss, then one value per half-step
    std::uint64_t seed = 0;                 // base seed of the run
    std::size_t restarts = 1;
    std::size_t best_restart = 0;           // index of the restart that won

    double final_loss() const { return loss_history.empty() ? 0.0 : loss_history.back(); }
    bool operator==(const CoclusterModel&) const = default;
};

struct Prototypes {
    DenseMatrix row;            // k x cols: q(y | row cluster)
    DenseMatrix col;            // l x rows: q(x | column cluster)
    DenseMatrix cluster_joint;  // k x l: p(row cluster, column cluster)
};

using AssociationMatrix = DenseMatrix;

struct CoclusterConfig {
    std::size_t tau_max = 20;
    double tol = 1e-9;
    std::size_t restarts = 8;
    std::uint64_t seed = 0;
    std::size_t threads = 1;  // restarts run concurrently; results do not depend on this
    // When false the loop always runs tau_max iterations (used for timing).
    bool early_stop = true;
};

// Called after every half-step with the assignments at that point and the
// prototypes that drove the step.
struct HalfStepEvent {
    bool row_step = true;
    std::size_t iteration = 0;
    std::span<const std::uint32_t> row_assign;
    std::span<const std::uint32_t> col_assign;
    const DenseMatrix* step_cluster_joint = nullptr;  // p(row cluster, col cluster) before the step
    std::span<const std::uint32_t> step_row_assign;   // assignments before the step
    std::span<const std::uint32_t> step_col_assign;
    double loss = 0.0;
};
using HalfStepObserver = std::function<void(const HalfStepEvent&)>;

// I(X;Y) in nats; 0 log 0 terms are zero.
double mutual_information(const JointDistribution& p);
double mutual_information(const DenseMatrix& p);

// Relative entropy in nats; +inf when p has mass where q has none.
double kl_divergence(std::span<const double> p, std::span<const double> q);

AssociationMatrix association_matrix(const JointDistribution& p, std::span<const std::uint32_t> row_assign,
                                     std::size_t k, std::span<const std::uint32_t> col_assign, std::size_t l);
AssociationMatrix association_matrix(const JointDistribution& p, const CoclusterModel& model);

// I(X;Y) - I(Xhat;Yhat).
double loss(const JointDistribution& p, const CoclusterModel& model);

// Throws EmptyCluster when a cluster has no members.
Prototypes build_prototypes(const JointDistribution& p, const CoclusterModel& model);

// Seeded labels with every cluster non-empty: the first `clusters` entries of a
// shuffle seed one cluster each, the others draw a cluster uniformly.
std::vector<std::uint32_t> random_surjective_assignment(std::size_t n, std::size_t clusters, std::uint64_t seed);

// Single alternating-minimization run from the given starting assignment.
CoclusterModel cocluster_from(const JointDistribution& p, std::size_t k, std::size_t l,
                              std::vector<std::uint32_t> row_assign, std::vector<std::uint32_t> col_assign,
                              const CoclusterConfig& config, const HalfStepObserver& observer = {});

// Best of config.restarts seeded runs; ties go to the earlier restart.
CoclusterModel cocluster(const JointDistribution& p, std::size_t k, std::size_t l,
                         const CoclusterConfig& config = {}, const HalfStepObserver& observer = {});

// Model file: JSON with k, l, seed, assignments and loss history.
// The provenance block, when given, is the first member of the object.
void write_model(const CoclusterModel& model, std::ostream& out, const Provenance* provenance = nullptr);
CoclusterModel read_model(std::istream& in, const std::string& name = "model");
void write_model(const CoclusterModel& model, const std::filesystem::path& path,
                 const Provenance* provenance = nullptr);
CoclusterModel read_model(const std::filesystem::path& path);

// Association grid with cluster labels (rows 1.., columns A..).
void write_association(const AssociationMatrix& a, std::ostream& out, const Provenance* provenance = nullptr);
AssociationMatrix read_association(std::istream& in, const std::string& name = "association");

std::string column_cluster_label(std::size_t c);

}  // namespace netcc
