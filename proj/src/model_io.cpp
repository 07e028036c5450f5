#include <fstream>
#include <istream>
#include <ostream>

#include "json_util.hpp"
#include "netcc/cocluster.hpp"
#include "text.hpp"

namespace netcc {

using ordered_json = nlohmann::ordered_json;

void write_model(const CoclusterModel& model, std::ostream& out, const Provenance* provenance) {
    ordered_json j;
    if (provenance) j["provenance"] = provenance_json(*provenance);
    j["k"] = model.k;
    j["l"] = model.l;
    j["seed"] = model.seed;
    j["restarts"] = model.restarts;
    j["best_restart"] = model.best_restart;
    j["tau"] = model.tau;
    j["loss_history"] = model.loss_history;
    auto side = [](const std::vector<std::string>& ids, const std::vector<std::uint32_t>& assign) {
        auto arr = ordered_json::array();
        for (std::size_t i = 0; i < ids.size(); ++i) arr.push_back(ordered_json::array({ids[i], assign[i]}));
        return arr;
    };
    j["rows"] = side(model.row_ids, model.row_assign);
    j["cols"] = side(model.col_ids, model.col_assign);
    out << j.dump(1) << '\n';
}

CoclusterModel read_model(std::istream& in, const std::string& name) {
    CoclusterModel m;
    try {
        auto j = nlohmann::json::parse(in);
        m.k = j.at("k").get<std::size_t>();
        m.l = j.at("l").get<std::size_t>();
        m.seed = j.at("seed").get<std::uint64_t>();
        m.restarts = j.value("restarts", std::size_t{1});
        m.best_restart = j.value("best_restart", std::size_t{0});
        m.tau = j.value("tau", std::size_t{0});
        m.loss_history = j.value("loss_history", std::vector<double>{});
        for (const auto& r : j.at("rows")) {
            m.row_ids.push_back(r.at(0).get<std::string>());
            m.row_assign.push_back(r.at(1).get<std::uint32_t>());
        }
        for (const auto& c : j.at("cols")) {
            m.col_ids.push_back(c.at(0).get<std::string>());
            m.col_assign.push_back(c.at(1).get<std::uint32_t>());
        }
    } catch (const nlohmann::json::exception& e) {
        throw DataError(name + ": " + e.what());
    }
    if (m.k < 1 || m.l < 1) throw DataError(name + ": k and l must be at least 1");
    for (auto c : m.row_assign)
        if (c >= m.k) throw DataError(name + ": row cluster out of range");
    for (auto c : m.col_assign)
        if (c >= m.l) throw DataError(name + ": column cluster out of range");
    return m;
}

void write_model(const CoclusterModel& model, const std::filesystem::path& path, const Provenance* provenance) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path.string());
    write_model(model, out, provenance);
}

CoclusterModel read_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());
    return read_model(in, path.string());
}

void write_association(const AssociationMatrix& a, std::ostream& out, const Provenance* provenance) {
    if (provenance) provenance->write(out);
    out << "cluster";
    for (std::size_t c = 0; c < a.cols(); ++c) out << ',' << column_cluster_label(c);
    out << '\n';
    for (std::size_t r = 0; r < a.rows(); ++r) {
        out << r + 1;
        for (std::size_t c = 0; c < a.cols(); ++c) out << ',' << text::format_double(a(r, c));
        out << '\n';
    }
}

AssociationMatrix read_association(std::istream& in, const std::string& name) {
    std::vector<std::vector<double>> rows;
    std::size_t cols = 0;
    bool header = true;
    for_each_record(in, [&](std::string_view line, std::size_t no) {
        auto f = text::split(line, ',');
        if (header) {
            cols = f.size() - 1;
            header = false;
            return;
        }
        if (f.size() != cols + 1) throw DataError(name + ":" + std::to_string(no) + ": ragged row");
        std::vector<double> row(cols);
        for (std::size_t c = 0; c < cols; ++c)
            if (!text::parse_double(f[c + 1], row[c]))
                throw DataError(name + ":" + std::to_string(no) + ": invalid number");
        rows.push_back(std::move(row));
    });
    AssociationMatrix a(rows.size(), cols);
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < cols; ++c) a(r, c) = rows[r][c];
    return a;
}

}  // namespace netcc
