#include "netcc/stability.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <istream>
#include <ostream>
#include <thread>
#include <unordered_map>
#include <unordered_set>

#include "json_util.hpp"
#include "netcc/simd.hpp"
#include "text.hpp"

namespace netcc {

double stability_score(const DenseMatrix& reference, const DenseMatrix& other) {
    return 100.0 * (1.0 - cosine_dissimilarity(reference, other));
}

PeriodData restrict_period(const std::string& label, const ContingencyMatrix& global,
                           const std::map<std::string, ContingencyMatrix>& by_building,
                           const CoclusterModel& model) {
    PeriodData out;
    out.label = label;
    RestrictStats st;
    auto g = restrict_to(global, model.row_ids, model.col_ids, &st);
    prune(g);
    if (g.cells.empty()) throw EmptyOverlap("period '" + label + "' shares no mass with the model");
    out.global = scale_matrix(g);
    out.dropped_mass = st.total_before > 0.0 ? 1.0 - st.total_after / st.total_before : 0.0;
    for (const auto& [building, m] : by_building) {
        auto b = restrict_to(m, model.row_ids, model.col_ids);
        prune(b);
        if (!b.cells.empty()) out.by_building.emplace(building, scale_matrix(b));
    }
    return out;
}

Recreated recreate_matrices(const PeriodData& period, const CoclusterModel& model) {
    const auto& p = period.global;
    std::unordered_map<std::string_view, std::uint32_t> rows, cols;
    for (std::size_t i = 0; i < model.row_ids.size(); ++i) rows.emplace(model.row_ids[i], model.row_assign[i]);
    for (std::size_t i = 0; i < model.col_ids.size(); ++i) cols.emplace(model.col_ids[i], model.col_assign[i]);

    std::vector<std::int64_t> ra(p.rows(), -1), ca(p.cols(), -1);
    std::size_t users = 0, domains = 0;
    for (std::size_t r = 0; r < p.rows(); ++r)
        if (auto it = rows.find(p.row_ids()[r]); it != rows.end()) {
            ra[r] = it->second;
            ++users;
        }
    for (std::size_t c = 0; c < p.cols(); ++c)
        if (auto it = cols.find(p.col_ids()[c]); it != cols.end()) {
            ca[c] = it->second;
            ++domains;
        }

    Recreated out{AssociationMatrix(model.k, model.l), {}, {}};
    double kept = 0.0;
    for (const auto& e : p.entries()) {
        if (ra[e.row] < 0 || ca[e.col] < 0) continue;
        out.association(static_cast<std::size_t>(ra[e.row]), static_cast<std::size_t>(ca[e.col])) += e.p;
        kept += e.p;
    }
    if (!(kept > 0.0)) throw EmptyOverlap("period '" + period.label + "' shares no mass with the model");
    for (double& v : out.association.values()) v /= kept;

    out.descriptors = building_descriptors(period.by_building, model);
    out.coverage.period = period.label;
    // Rows and columns of a JointDistribution always carry mass.
    out.coverage.user_fraction = model.row_ids.empty() ? 0.0 : static_cast<double>(users) / model.row_ids.size();
    out.coverage.domain_fraction = model.col_ids.empty() ? 0.0 : static_cast<double>(domains) / model.col_ids.size();
    out.coverage.dropped_mass = std::max(period.dropped_mass, 1.0 - kept);
    out.coverage.buildings_active = out.descriptors.size();
    return out;
}

std::optional<double> location_score(const std::vector<ContextDescriptor>& a, const std::vector<ContextDescriptor>& b,
                                     std::size_t* common) {
    std::unordered_map<std::string_view, const ContextDescriptor*> in_b;
    for (const auto& d : b) in_b.emplace(d.building, &d);
    std::vector<ContextDescriptor> sa, sb;
    for (const auto& d : a)
        if (auto it = in_b.find(d.building); it != in_b.end()) {
            sa.push_back(d);
            sb.push_back(*it->second);
        }
    if (common) *common = sa.size();
    if (sa.size() < 2) return std::nullopt;
    const auto da = dissimilarity_matrix(sa), db = dissimilarity_matrix(sb);
    const double na = simd::dot(da.values.values(), da.values.values());
    const double nb = simd::dot(db.values.values(), db.values.values());
    // All buildings identical in a period: agreement only if the same holds in the other.
    if (na == 0.0 || nb == 0.0) return na == nb ? 100.0 : 0.0;
    return stability_score(da.values, db.values);
}

StabilityReport stability_report(const PeriodData& reference, const std::vector<PeriodData>& others,
                                 const CoclusterModel& model, std::size_t threads) {
    if (others.empty()) throw ContractError("stability_report needs at least one comparison period");
    std::vector<const PeriodData*> order{&reference};
    for (const auto& p : others) order.push_back(&p);
    std::stable_sort(order.begin() + 1, order.end(),
                     [](const PeriodData* x, const PeriodData* y) { return x->label < y->label; });

    std::vector<std::optional<Recreated>> rec(order.size());
    std::vector<std::exception_ptr> errors(order.size());
    auto work = [&](std::size_t i) {
        try {
            rec[i] = recreate_matrices(*order[i], model);
        } catch (...) {
            errors[i] = std::current_exception();
        }
    };
    threads = std::clamp<std::size_t>(threads, 1, order.size());
    if (threads == 1) {
        for (std::size_t i = 0; i < order.size(); ++i) work(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < threads; ++t)
            pool.emplace_back([&] {
                for (std::size_t i; (i = next.fetch_add(1)) < order.size();) work(i);
            });
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);

    StabilityReport report;
    report.reference = reference.label;
    for (std::size_t i = 1; i < order.size(); ++i) report.comparisons.push_back(order[i]->label);
    for (const auto& r : rec) report.coverage.push_back(r->coverage);
    for (std::size_t i = 0; i < order.size(); ++i)
        for (std::size_t j = i + 1; j < order.size(); ++j) {
            PairScore s;
            s.a = order[i]->label;
            s.b = order[j]->label;
            s.global = stability_score(rec[i]->association, rec[j]->association);
            s.location = location_score(rec[i]->descriptors, rec[j]->descriptors, &s.common_buildings);
            s.excluded_buildings =
                rec[i]->descriptors.size() + rec[j]->descriptors.size() - 2 * s.common_buildings;
            report.pairs.push_back(std::move(s));
        }
    return report;
}

void write_report_json(const StabilityReport& report, std::ostream& out, const Provenance* provenance) {
    nlohmann::ordered_json j;
    if (provenance) j["provenance"] = provenance_json(*provenance);
    j["reference"] = report.reference;
    j["comparisons"] = report.comparisons;
    auto pairs = nlohmann::ordered_json::array();
    for (const auto& p : report.pairs) {
        nlohmann::ordered_json e;
        e["a"] = p.a;
        e["b"] = p.b;
        e["global"] = p.global;
        e["location"] = p.location ? nlohmann::ordered_json(*p.location) : nlohmann::ordered_json(nullptr);
        e["common_buildings"] = p.common_buildings;
        e["excluded_buildings"] = p.excluded_buildings;
        pairs.push_back(std::move(e));
    }
    j["pairs"] = std::move(pairs);
    auto cov = nlohmann::ordered_json::array();
    for (const auto& c : report.coverage)
        cov.push_back({{"period", c.period},
                       {"user_fraction", c.user_fraction},
                       {"domain_fraction", c.domain_fraction},
                       {"dropped_mass", c.dropped_mass},
                       {"buildings_active", c.buildings_active}});
    j["coverage"] = std::move(cov);
    out << j.dump(1) << '\n';
}

void write_report_table(const StabilityReport& report, std::ostream& out, const Provenance* provenance) {
    if (provenance) provenance->write(out);
    char buf[32];
    auto pct = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.2f", v);
        return std::string(buf);
    };
    for (const auto& p : report.pairs) out << "global:" << p.a << '/' << p.b << ' ' << pct(p.global) << '\n';
    for (const auto& p : report.pairs)
        out << "location:" << p.a << '/' << p.b << ' ' << (p.location ? pct(*p.location) : std::string("nan"))
            << '\n';
}

StabilityReport read_report_json(std::istream& in, const std::string& name) {
    try {
        const auto j = nlohmann::json::parse(in);
        StabilityReport r;
        r.reference = j.at("reference").get<std::string>();
        r.comparisons = j.at("comparisons").get<std::vector<std::string>>();
        for (const auto& e : j.at("pairs")) {
            PairScore p;
            p.a = e.at("a").get<std::string>();
            p.b = e.at("b").get<std::string>();
            p.global = e.at("global").get<double>();
            if (!e.at("location").is_null()) p.location = e.at("location").get<double>();
            p.common_buildings = e.at("common_buildings").get<std::size_t>();
            p.excluded_buildings = e.at("excluded_buildings").get<std::size_t>();
            r.pairs.push_back(std::move(p));
        }
        for (const auto& e : j.at("coverage")) {
            Coverage c;
            c.period = e.at("period").get<std::string>();
            c.user_fraction = e.at("user_fraction").get<double>();
            c.domain_fraction = e.at("domain_fraction").get<double>();
            c.dropped_mass = e.at("dropped_mass").get<double>();
            c.buildings_active = e.at("buildings_active").get<std::size_t>();
            r.coverage.push_back(std::move(c));
        }
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(name + ": " + e.what());
    }
}

}  // namespace netcc
