#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "netcc/cocluster.hpp"
#include "netcc/location.hpp"
#include "netcc/pipeline.hpp"

namespace netcc {

// Scaled matrices of one period: the global table and one per building.
struct PeriodData {
    std::string label;
    JointDistribution global;
    std::map<std::string, JointDistribution> by_building;
    double dropped_mass = 0.0;  // fraction of raw minutes removed by restrict_period
};

// Restricts raw matrices to the model's users and domains, then scales them.
// Buildings left without mass are omitted.
PeriodData restrict_period(const std::string& label, const ContingencyMatrix& global,
                           const std::map<std::string, ContingencyMatrix>& by_building,
                           const CoclusterModel& model);

struct Coverage {
    std::string period;
    double user_fraction = 0.0;    // reference users with mass in this period
    double domain_fraction = 0.0;  // reference domains with mass in this period
    double dropped_mass = 0.0;     // mass on entities the model does not know
    std::size_t buildings_active = 0;
};

// Matrices of a period rebuilt under the model's frozen assignments.
struct Recreated {
    AssociationMatrix association;  // sums to 1
    std::vector<ContextDescriptor> descriptors;
    Coverage coverage;
};

struct PairScore {
    std::string a;
    std::string b;
    double global = 0.0;
    std::optional<double> location;  // unset when fewer than two buildings are active in both
    std::size_t common_buildings = 0;
    std::size_t excluded_buildings = 0;  // active in exactly one of the two periods
};

struct StabilityReport {
    std::string reference;
    std::vector<std::string> comparisons;  // sorted by label
    std::vector<PairScore> pairs;          // every unordered pair, reference first
    std::vector<Coverage> coverage;        // reference first, then comparisons
};

// 100 * (1 - cosine dissimilarity).
double stability_score(const DenseMatrix& reference, const DenseMatrix& other);

// Throws EmptyOverlap when no mass falls on entities of the model.
Recreated recreate_matrices(const PeriodData& period, const CoclusterModel& model);

// Location score over the buildings active in both periods.
std::optional<double> location_score(const std::vector<ContextDescriptor>& a,
                                     const std::vector<ContextDescriptor>& b, std::size_t* common = nullptr);

StabilityReport stability_report(const PeriodData& reference, const std::vector<PeriodData>& others,
                                 const CoclusterModel& model, std::size_t threads = 1);

void write_report_json(const StabilityReport& report, std::ostream& out, const Provenance* provenance = nullptr);
// "global:a/b percent" and "location:a/b percent" lines.
void write_report_table(const StabilityReport& report, std::ostream& out, const Provenance* provenance = nullptr);
StabilityReport read_report_json(std::istream& in, const std::string& name = "report");

}  // namespace netcc
