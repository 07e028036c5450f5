#include "netcc/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>

#include "json_util.hpp"
#include "netcc/cocluster.hpp"
#include "netcc/error.hpp"
#include "netcc/location.hpp"
#include "netcc/matrix_io.hpp"
#include "netcc/stability.hpp"
#include "netcc/synth.hpp"
#include "text.hpp"

namespace netcc {

namespace fs = std::filesystem;

namespace {

std::ifstream open_in(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    return in;
}

void write_file(const fs::path& path, const std::function<void(std::ostream&)>& body) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path.string());
    body(out);
    if (!out) throw DataError("write failed: " + path.string());
}

Instant parse_instant_option(const std::string& text, const char* what) {
    auto t = parse_iso_instant(text);
    if (!t) throw ContractError(std::string("invalid ") + what + " instant '" + text + "'");
    return *t;
}

void add_matrix_inputs(Provenance& prov, const fs::path& base) {
    prov.add_input(fs::path(base.string() + ".triples"));
    prov.add_input(fs::path(base.string() + ".header"));
}

std::vector<fs::path> building_bases(const fs::path& dir) {
    std::vector<fs::path> out;
    const auto bdir = dir / "buildings";
    if (!fs::exists(bdir)) return out;
    for (const auto& e : fs::directory_iterator(bdir))
        if (e.path().extension() == ".header") out.push_back(e.path().parent_path() / e.path().stem());
    std::sort(out.begin(), out.end());
    return out;
}

void add_period_inputs(Provenance& prov, const fs::path& dir) {
    add_matrix_inputs(prov, dir / "global");
    for (const auto& b : building_bases(dir)) add_matrix_inputs(prov, b);
}

JointDistribution scaled(ContingencyMatrix m) {
    prune(m);
    if (m.cells.empty()) throw DataError("matrix '" + m.period + "' has no positive cells");
    return scale_matrix(m);
}

nlohmann::ordered_json stats_json(const PipelineStats& s) {
    nlohmann::ordered_json j;
    j["flow_lines"] = s.flow_lines;
    j["dhcp_lines"] = s.dhcp_lines;
    j["session_lines"] = s.session_lines;
    j["malformed_flows"] = s.malformed_flows;
    j["malformed_dhcp"] = s.malformed_dhcp;
    j["malformed_sessions"] = s.malformed_sessions;
    j["out_of_period"] = s.out_of_period;
    j["ambiguous_endpoint"] = s.ambiguous_endpoint;
    j["filtered_prefix"] = s.filtered_prefix;
    j["not_top_domain"] = s.not_top_domain;
    j["unresolved_user"] = s.unresolved_user;
    j["resolved"] = s.resolved;
    j["location_unresolved"] = s.location_unresolved;
    j["unknown_port"] = s.unknown_port;
    j["prefixes_kept"] = s.prefixes_kept;
    j["rows_pruned"] = s.rows_pruned;
    j["cols_pruned"] = s.cols_pruned;
    j["fewer_domains_than_requested"] = s.fewer_domains_than_requested;
    j["sessions"] = {{"implicit_ends", s.sessions.implicit_ends},
                     {"orphan_ends", s.sessions.orphan_ends},
                     {"closed_at_period_end", s.sessions.closed_at_period_end}};
    return j;
}

struct Cli {
    std::ostream& out;
    std::ostream& err;
    CLI::App app{"Network trace co-clustering and location analysis"};
    std::function<void()> action;
    CLI::App* active = nullptr;

    Provenance provenance() const {
        Provenance p;
        // Output locations and thread counts do not change results; keep them out of the hash.
        std::istringstream all(active ? active->config_to_str(true, false) : std::string());
        std::string kept, line;
        while (std::getline(all, line)) {
            const auto key = line.substr(0, line.find('='));
            const auto name = key.substr(key.rfind('.') == std::string::npos ? 0 : key.rfind('.') + 1);
            if (name == "out" || name == "threads" || name == "json" || name == "table") continue;
            kept += line + '\n';
        }
        p.set_config(kept);
        return p;
    }

    Cli(std::ostream& o, std::ostream& e) : out(o), err(e) {
        app.require_subcommand(1);
        app.set_version_flag("--version", NETCC_VERSION);
        app.set_config("--config", "", "INI file with option defaults; sections name subcommands");
        add_aggregate();
        add_cocluster();
        add_assoc();
        add_locations();
        add_stability();
        add_synth();
        add_report();
    }

    void on_run(CLI::App* sub, std::function<void()> fn) {
        sub->callback([this, sub, fn = std::move(fn)] {
            active = sub;
            action = fn;
        });
    }

    struct AggregateArgs {
        std::string flows, dhcp, sessions, prefixes, ports, out;
        std::string period, begin, end, mode = "union", domains_from;
        int year = 0;
        std::vector<std::string> local_nets;
        std::uint64_t threshold = 100000;
        std::size_t top = 100;
        std::int64_t zero_floor_ms = 1000;
        bool skip_malformed = false;
        bool sum_durations = false;
    } agg;

    void add_aggregate() {
        auto* s = app.add_subcommand("aggregate", "Integrate flow, DHCP and session traces into online-time matrices");
        s->add_option("--flows", agg.flows, "Netflow records")->required()->envname("NETCC_FLOWS")->check(CLI::ExistingFile);
        s->add_option("--dhcp", agg.dhcp, "DHCP lease log")->required()->envname("NETCC_DHCP")->check(CLI::ExistingFile);
        s->add_option("--sessions", agg.sessions, "WLAN session log")->required()->envname("NETCC_SESSIONS")->check(CLI::ExistingFile);
        s->add_option("--prefixes", agg.prefixes, "Prefix to domain map")->required()->envname("NETCC_PREFIXES")->check(CLI::ExistingFile);
        s->add_option("--ports", agg.ports, "Switch port to building map")->required()->envname("NETCC_PORTS")->check(CLI::ExistingFile);
        s->add_option("--out", agg.out, "Output period directory")->required()->envname("NETCC_OUT");
        s->add_option("--period", agg.period, "Period label")->required();
        s->add_option("--begin", agg.begin, "Period start (ISO 8601, inclusive)")->required();
        s->add_option("--end", agg.end, "Period end (ISO 8601, exclusive)")->required();
        s->add_option("--year", agg.year, "Year of the netflow timestamps (default: year of --begin)");
        s->add_option("--local-net", agg.local_nets, "Local address block in CIDR form")->required();
        s->add_option("--prefix-threshold", agg.threshold, "Minimum flows per /24 prefix")->capture_default_str()->check(CLI::PositiveNumber);
        s->add_option("--top-domains", agg.top, "Number of domains kept")->capture_default_str()->check(CLI::PositiveNumber);
        s->add_option("--domains-from", agg.domains_from, "Use the domain list of this matrix (base path) instead of top-d selection");
        s->add_option("--mode", agg.mode, "Online time of overlapping flows")->check(CLI::IsMember({"union", "sum"}))->capture_default_str();
        s->add_option("--zero-floor-ms", agg.zero_floor_ms, "Duration credited to zero-length flows")->capture_default_str()->check(CLI::NonNegativeNumber);
        s->add_flag("--sum-durations", agg.sum_durations, "Shorthand for --mode sum");
        s->add_flag("--skip-malformed", agg.skip_malformed, "Count and skip malformed records instead of failing");
        on_run(s, [this] { run_aggregate(); });
    }

    void run_aggregate() {
        PipelineConfig cfg;
        cfg.period = Period{agg.period, parse_instant_option(agg.begin, "--begin"), parse_instant_option(agg.end, "--end")};
        if (!(cfg.period.begin < cfg.period.end)) throw ContractError("--begin must precede --end");
        cfg.year = agg.year ? agg.year
                            : static_cast<int>(std::chrono::year_month_day{
                                  std::chrono::floor<std::chrono::days>(cfg.period.begin)}.year());
        for (const auto& n : agg.local_nets) {
            auto c = Cidr::parse(n);
            if (!c) throw ContractError("invalid --local-net '" + n + "'");
            cfg.local_nets.add(*c);
        }
        cfg.prefix_threshold = agg.threshold;
        cfg.top_domains = agg.top;
        cfg.aggregation.mode = agg.mode == "sum" || agg.sum_durations ? OnlineTimeMode::SumDurations : OnlineTimeMode::IntervalUnion;
        cfg.aggregation.zero_floor = Milliseconds(agg.zero_floor_ms);
        cfg.skip_malformed = agg.skip_malformed;
        auto prov = provenance();
        if (!agg.domains_from.empty()) {
            cfg.fixed_domains = read_matrix_header(fs::path(agg.domains_from)).col_ids;
            prov.add_input(agg.domains_from + ".header");
        }

        auto prefix_in = open_in(agg.prefixes);
        auto ports_in = open_in(agg.ports);
        PrefixDomainMap prefixes;
        PortBuildingMap ports;
        try {
            prefixes = PrefixDomainMap::load(prefix_in);
        } catch (const ParseError& e) {
            throw DataError(agg.prefixes + ":" + std::to_string(e.line()) + ": " + e.reason());
        }
        try {
            ports = PortBuildingMap::load(ports_in);
        } catch (const ParseError& e) {
            throw DataError(agg.ports + ":" + std::to_string(e.line()) + ": " + e.reason());
        }
        auto flows = open_in(agg.flows);
        auto dhcp = open_in(agg.dhcp);
        auto sessions = open_in(agg.sessions);
        PipelineResult result;
        try {
            result = run_pipeline(flows, dhcp, sessions, prefixes, ports, cfg);
        } catch (const ParseError& e) {
            const std::string& r = e.reason();
            const std::string file = r.rfind("dhcp: ", 0) == 0       ? agg.dhcp
                                     : r.rfind("sessions: ", 0) == 0 ? agg.sessions
                                                                     : agg.flows;
            throw DataError(file + ":" + std::to_string(e.line()) + ": " + r.substr(r.find(": ") + 2));
        }
        for (const auto& p : {agg.flows, agg.dhcp, agg.sessions, agg.prefixes, agg.ports}) prov.add_input(p);

        const fs::path dir(agg.out);
        fs::create_directories(dir / "buildings");
        for (const auto& e : fs::directory_iterator(dir / "buildings")) fs::remove(e.path());
        write_matrix(result.global, dir / "global", &prov);
        for (const auto& [building, m] : result.by_building) write_matrix(m, dir / "buildings" / building, &prov);
        write_file(dir / "stats.json", [&](std::ostream& o) {
            nlohmann::ordered_json j;
            j["provenance"] = provenance_json(prov);
            j["period"] = agg.period;
            j["domains"] = result.domains;
            j["stats"] = stats_json(result.stats);
            o << j.dump(1) << '\n';
        });
        out << "aggregate: " << result.global.row_ids.size() << " users x " << result.global.col_ids.size()
            << " domains, " << result.by_building.size() << " buildings, " << result.stats.resolved
            << " flows resolved\n";
        if (result.stats.fewer_domains_than_requested)
            err << "warning: fewer than " << agg.top << " domains survived filtering\n";
    }

    // Either --period DIR or --matrix BASE.
    struct MatrixSource {
        std::string period_dir, matrix;
        fs::path base() const { return period_dir.empty() ? fs::path(matrix) : fs::path(period_dir) / "global"; }
    };

    void add_matrix_source(CLI::App* s, MatrixSource& src) {
        auto* a = s->add_option("--period", src.period_dir, "Period directory written by aggregate")->envname("NETCC_PERIOD");
        auto* b = s->add_option("--matrix", src.matrix, "Matrix base path (<base>.triples, <base>.header)");
        a->excludes(b);
        b->excludes(a);
    }

    static ContingencyMatrix load_source(const MatrixSource& src) {
        if (src.period_dir.empty() && src.matrix.empty()) throw ContractError("one of --period or --matrix is required");
        return read_matrix(src.base());
    }

    struct CoclusterArgs {
        MatrixSource src;
        std::string out;
        std::size_t k = 10, l = 10;
        CoclusterConfig cfg;
    } cc;

    void add_cocluster() {
        auto* s = app.add_subcommand("cocluster", "Co-cluster a user x domain matrix");
        add_matrix_source(s, cc.src);
        s->add_option("--k", cc.k, "Row (user) clusters")->capture_default_str()->check(CLI::PositiveNumber);
        s->add_option("--l", cc.l, "Column (domain) clusters")->capture_default_str()->check(CLI::PositiveNumber);
        s->add_option("--tau-max", cc.cfg.tau_max, "Maximum iterations")->capture_default_str()->check(CLI::PositiveNumber);
        s->add_option("--tol", cc.cfg.tol, "Stop when the loss improves by less")->capture_default_str()->check(CLI::NonNegativeNumber);
        s->add_option("--restarts", cc.cfg.restarts, "Seeded restarts")->capture_default_str()->check(CLI::PositiveNumber);
        s->add_option("--seed", cc.cfg.seed, "Base seed")->capture_default_str();
        s->add_option("--threads", cc.cfg.threads, "Concurrent restarts")->capture_default_str()->check(CLI::PositiveNumber);
        s->add_option("--out", cc.out, "Model file (JSON)")->required()->envname("NETCC_MODEL_OUT");
        on_run(s, [this] { run_cocluster(); });
    }

    void run_cocluster() {
        const auto p = scaled(load_source(cc.src));
        if (cc.k > p.rows() || cc.l > p.cols())
            throw ContractError("k and l must not exceed the matrix dimensions (" + std::to_string(p.rows()) + " x " +
                                std::to_string(p.cols()) + ")");
        auto prov = provenance();
        add_matrix_inputs(prov, cc.src.base());
        const auto model = cocluster(p, cc.k, cc.l, cc.cfg);
        write_model(model, fs::path(cc.out), &prov);
        out << "cocluster: loss " << text::format_double(model.final_loss()) << " after " << model.tau
            << " iterations (restart " << model.best_restart << " of " << model.restarts << ")\n";
    }

    struct AssocArgs {
        MatrixSource src;
        std::string model, out;
    } as;

    void add_assoc() {
        auto* s = app.add_subcommand("assoc", "Association level matrix of a model");
        add_matrix_source(s, as.src);
        s->add_option("--model", as.model, "Model file")->required()->envname("NETCC_MODEL")->check(CLI::ExistingFile);
        s->add_option("--out", as.out, "Association grid")->required();
        on_run(s, [this] { run_assoc(); });
    }

    void run_assoc() {
        const auto model = read_model(fs::path(as.model));
        auto m = load_source(as.src);
        RestrictStats st;
        m = restrict_to(m, model.row_ids, model.col_ids, &st);
        const auto p = scaled(std::move(m));
        auto prov = provenance();
        add_matrix_inputs(prov, as.src.base());
        prov.add_input(as.model);
        const auto a = association_matrix(p, model);
        write_file(as.out, [&](std::ostream& o) { write_association(a, o, &prov); });
        out << "assoc: " << model.k << " x " << model.l << " association matrix\n";
    }

    struct LocationArgs {
        std::string period, model, out, linkage = "average";
        double theta = 0.06, bin_width = 0.02;
        std::size_t clusters = 10, min_clique = 3;
    } loc;

    void add_locations() {
        auto* s = app.add_subcommand("locations", "Context descriptors, hierarchical clusters and cliques of buildings");
        s->add_option("--period", loc.period, "Period directory")->required()->envname("NETCC_PERIOD")->check(CLI::ExistingDirectory);
        s->add_option("--model", loc.model, "Model file")->required()->envname("NETCC_MODEL")->check(CLI::ExistingFile);
        s->add_option("--out", loc.out, "Output directory")->required()->envname("NETCC_OUT");
        s->add_option("--theta", loc.theta, "Clique threshold on dissimilarity")->capture_default_str()->check(CLI::Range(1e-12, 1.0));
        s->add_option("--linkage", loc.linkage, "Hierarchical linkage")->check(CLI::IsMember({"average", "complete", "single"}))->capture_default_str();
        s->add_option("--clusters", loc.clusters, "Hierarchical cluster count")->capture_default_str()->check(CLI::PositiveNumber);
        s->add_option("--min-clique", loc.min_clique, "Smallest clique reported")->capture_default_str()->check(CLI::PositiveNumber);
        s->add_option("--bin-width", loc.bin_width, "Histogram bin width")->capture_default_str()->check(CLI::Range(1e-6, 1.0));
        on_run(s, [this] { run_locations(); });
    }

    void run_locations() {
        const auto model = read_model(fs::path(loc.model));
        const auto pm = read_period_dir(loc.period);
        const auto data = restrict_period(pm.global.period, pm.global, pm.by_building, model);
        const auto descriptors = building_descriptors(data.by_building, model);
        if (descriptors.size() < 2) throw DataError(loc.period + ": fewer than two active buildings");
        const auto d = dissimilarity_matrix(descriptors);
        std::size_t n = loc.clusters;
        if (n > d.size()) {
            err << "warning: --clusters " << n << " exceeds the " << d.size() << " active buildings\n";
            n = d.size();
        }
        const auto h = hierarchical_clusters(d, n, *parse_linkage(loc.linkage));
        const auto g = threshold_graph(d, loc.theta);
        const auto cliques = maximal_cliques(g, loc.min_clique);
        const auto iso = isolated_nodes(g);
        const auto avg = average_dissimilarity(d);
        const auto hist = dissimilarity_histogram(d, loc.bin_width);

        auto prov = provenance();
        add_period_inputs(prov, loc.period);
        prov.add_input(loc.model);
        const fs::path dir(loc.out);
        write_file(dir / "descriptors.txt", [&](std::ostream& o) { write_descriptors(descriptors, o, &prov); });
        write_file(dir / "dissimilarity.csv", [&](std::ostream& o) { write_dissimilarity(d, o, &prov); });
        write_file(dir / "dendrogram.txt", [&](std::ostream& o) { write_dendrogram(h, d.ids, o, &prov); });
        write_file(dir / "cliques.txt", [&](std::ostream& o) { write_cliques(cliques, g, o, &prov); });
        write_file(dir / "isolated.txt", [&](std::ostream& o) {
            prov.write(o);
            for (auto i : iso) o << d.ids[i] << '\n';
        });
        write_file(dir / "histogram.txt", [&](std::ostream& o) { write_histogram(hist, loc.bin_width, o, &prov); });
        write_file(dir / "average.txt", [&](std::ostream& o) {
            prov.write(o);
            for (std::size_t i = 0; i < avg.size(); ++i) o << d.ids[i] << ' ' << text::format_double(avg[i]) << '\n';
        });
        out << "locations: " << d.size() << " buildings, " << h.clusters << " clusters, " << cliques.size()
            << " cliques, edge density " << text::format_double(g.density()) << '\n';
    }

    struct StabilityArgs {
        std::string model, reference, json, table;
        std::vector<std::string> compare;
        std::size_t threads = 1;
    } st;

    void add_stability() {
        auto* s = app.add_subcommand("stability", "Global and location stability against a reference period");
        s->add_option("--model", st.model, "Model fitted on the reference period")->required()->envname("NETCC_MODEL")->check(CLI::ExistingFile);
        s->add_option("--reference", st.reference, "Reference period directory")->required()->check(CLI::ExistingDirectory);
        s->add_option("--compare", st.compare, "Comparison period directories")->required()->check(CLI::ExistingDirectory);
        s->add_option("--json", st.json, "Report as JSON");
        s->add_option("--table", st.table, "Report as a two-column table (default: stdout)");
        s->add_option("--threads", st.threads, "Periods recreated concurrently")->capture_default_str()->check(CLI::PositiveNumber);
        on_run(s, [this] { run_stability(); });
    }

    void run_stability() {
        const auto model = read_model(fs::path(st.model));
        auto load = [&](const std::string& dir) {
            const auto pm = read_period_dir(dir);
            return restrict_period(pm.global.period, pm.global, pm.by_building, model);
        };
        const auto ref = load(st.reference);
        std::vector<PeriodData> others;
        for (const auto& c : st.compare) others.push_back(load(c));
        const auto report = stability_report(ref, others, model, st.threads);
        auto prov = provenance();
        prov.add_input(st.model);
        add_period_inputs(prov, st.reference);
        for (const auto& c : st.compare) add_period_inputs(prov, c);
        if (!st.json.empty()) write_file(st.json, [&](std::ostream& o) { write_report_json(report, o, &prov); });
        if (!st.table.empty())
            write_file(st.table, [&](std::ostream& o) { write_report_table(report, o, &prov); });
        else
            write_report_table(report, out);
    }

    struct SynthArgs {
        std::string spec, out;
    } sy;

    void add_synth() {
        auto* s = app.add_subcommand("synth", "Generate synthetic traces with planted structure");
        s->add_option("--spec", sy.spec, "Planted spec (key = value lines)")->required()->check(CLI::ExistingFile);
        s->add_option("--out", sy.out, "Output directory; one subdirectory per period")->required()->envname("NETCC_OUT");
        on_run(s, [this] { run_synth(); });
    }

    void run_synth() {
        const auto spec = load_planted_spec(sy.spec);
        const std::size_t periods = std::max<std::size_t>(1, spec.periods.size());
        for (std::size_t i = 0; i < periods; ++i) {
            const auto traces = gen_synthetic_traces(spec, i);
            const auto dir = fs::path(sy.out) / traces.config.period.label;
            write_synthetic_traces(traces, dir);
            out << "synth: " << dir.string() << ": " << traces.flows.size() << " flows (" << traces.noise_flows
                << " noise)\n";
        }
    }

    struct ReportArgs {
        std::string kind, input, out;
    } rp;

    void add_report() {
        auto* s = app.add_subcommand("report", "Render an artifact as plot-ready text");
        s->add_option("--kind", rp.kind, "Artifact kind")
            ->required()
            ->check(CLI::IsMember({"association", "dissimilarity", "dendrogram", "cliques", "histogram", "stability"}));
        s->add_option("--input", rp.input, "Artifact file")->required()->check(CLI::ExistingFile);
        s->add_option("--out", rp.out, "Output file (default: stdout)");
        on_run(s, [this] { run_report(); });
    }

    void run_report() {
        auto prov = provenance();
        prov.add_input(rp.input);
        std::ostringstream body;
        auto in = open_in(rp.input);
        auto grid = [&](const DenseMatrix& m) {
            for (std::size_t r = 0; r < m.rows(); ++r) {
                for (std::size_t c = 0; c < m.cols(); ++c) body << (c ? " " : "") << text::format_double(m(r, c));
                body << '\n';
            }
        };
        if (rp.kind == "association") {
            grid(read_association(in, rp.input));
        } else if (rp.kind == "dissimilarity") {
            grid(read_dissimilarity(in, rp.input).values);
        } else if (rp.kind == "stability") {
            const auto r = read_report_json(in, rp.input);
            for (const auto& p : r.pairs) body << "global:" << p.a << '/' << p.b << ' ' << text::format_double(p.global) << '\n';
            for (const auto& p : r.pairs)
                body << "location:" << p.a << '/' << p.b << ' '
                     << (p.location ? text::format_double(*p.location) : std::string("nan")) << '\n';
        } else {
            // Line-oriented artifacts: merge index and height, clique index and size, bin and count.
            std::size_t idx = 0;
            for_each_record(in, [&](std::string_view line, std::size_t no) {
                if (rp.kind == "dendrogram") {
                    auto f = text::split(line, ',');
                    if (f[0] == "leaf") return;
                    if (f[0] != "merge" || f.size() != 5)
                        throw DataError(rp.input + ":" + std::to_string(no) + ": expected a merge line");
                    body << idx++ << ' ' << f[3] << '\n';
                } else if (rp.kind == "cliques") {
                    body << idx++ << ' ' << text::split(line, ',').size() << '\n';
                } else {
                    auto f = text::split(line, ' ');
                    if (f.size() != 2) throw DataError(rp.input + ":" + std::to_string(no) + ": expected two columns");
                    body << f[0] << ' ' << f[1] << '\n';
                }
            });
        }
        if (rp.out.empty()) {
            out << body.str();
        } else {
            write_file(rp.out, [&](std::ostream& o) {
                prov.write(o);
                o << body.str();
            });
        }
    }
};

}  // namespace

PeriodMatrices read_period_dir(const fs::path& dir) {
    PeriodMatrices out;
    out.global = read_matrix(dir / "global");
    for (const auto& base : building_bases(dir)) out.by_building.emplace(base.filename().string(), read_matrix(base));
    return out;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    Cli cli(out, err);
    try {
        cli.app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = cli.app.exit(e, out, err);
        return code == 0 ? 0 : 1;
    }
    try {
        cli.action();
        return 0;
    } catch (const ContractError& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    std::vector<const char*> argv{"netcc"};
    for (const auto& a : args) argv.push_back(a.c_str());
    return run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace netcc
