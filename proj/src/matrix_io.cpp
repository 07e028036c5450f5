#include "netcc/matrix_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <tuple>
#include <istream>
#include <ostream>
#include <unordered_map>

#include "text.hpp"

namespace netcc {

namespace {

[[noreturn]] void bad(const std::string& name, std::size_t line, const std::string& what) {
    throw DataError(name + ":" + std::to_string(line) + ": " + what);
}

std::filesystem::path with_suffix(const std::filesystem::path& base, const char* suffix) {
    auto p = base;
    p += suffix;
    return p;
}

}  // namespace

void write_matrix(const ContingencyMatrix& m, std::ostream& triples, std::ostream& header,
                  const Provenance* provenance) {
    if (provenance) {
        provenance->write(triples);
        provenance->write(header);
    }
    header << "period " << m.period << '\n';
    header << "rows " << m.row_ids.size() << '\n';
    for (const auto& id : m.row_ids) header << id << '\n';
    header << "cols " << m.col_ids.size() << '\n';
    for (const auto& id : m.col_ids) header << id << '\n';
    for (const auto& c : m.cells)
        triples << m.row_ids[c.row] << ',' << m.col_ids[c.col] << ',' << text::format_double(c.value) << '\n';
}

MatrixHeader read_matrix_header(std::istream& in, const std::string& name) {
    MatrixHeader h;
    enum class State { Period, RowCount, Rows, ColCount, Cols, Done } state = State::Period;
    std::size_t remaining = 0;
    std::string line;
    std::size_t no = 0;
    auto count_of = [&](std::string_view v, std::string_view key) {
        if (!v.starts_with(key)) bad(name, no, "expected '" + std::string(key) + " <n>'");
        auto num = text::trim(v.substr(key.size()));
        std::size_t n = 0;
        auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), n);
        if (ec != std::errc{} || ptr != num.data() + num.size()) bad(name, no, "invalid count");
        return n;
    };
    while (std::getline(in, line)) {
        ++no;
        auto v = text::trim(line);
        if (v.empty() || v.front() == '#') continue;
        switch (state) {
            case State::Period:
                if (!v.starts_with("period")) bad(name, no, "expected 'period <label>'");
                h.period = std::string(text::trim(v.substr(6)));
                state = State::RowCount;
                break;
            case State::RowCount:
                remaining = count_of(v, "rows");
                state = remaining ? State::Rows : State::ColCount;
                break;
            case State::Rows:
                h.row_ids.emplace_back(v);
                if (--remaining == 0) state = State::ColCount;
                break;
            case State::ColCount:
                remaining = count_of(v, "cols");
                state = remaining ? State::Cols : State::Done;
                break;
            case State::Cols:
                h.col_ids.emplace_back(v);
                if (--remaining == 0) state = State::Done;
                break;
            case State::Done:
                bad(name, no, "unexpected trailing content");
        }
    }
    if (state != State::Done) bad(name, no, "truncated header");
    return h;
}

ContingencyMatrix read_matrix(std::istream& triples, std::istream& header, const std::string& name) {
    auto h = read_matrix_header(header, name + ".header");
    ContingencyMatrix m;
    m.period = std::move(h.period);
    m.row_ids = std::move(h.row_ids);
    m.col_ids = std::move(h.col_ids);
    std::unordered_map<std::string, std::uint32_t> rows, cols;
    for (std::size_t i = 0; i < m.row_ids.size(); ++i)
        if (!rows.emplace(m.row_ids[i], static_cast<std::uint32_t>(i)).second)
            throw DataError(name + ".header: duplicate row id " + m.row_ids[i]);
    for (std::size_t i = 0; i < m.col_ids.size(); ++i)
        if (!cols.emplace(m.col_ids[i], static_cast<std::uint32_t>(i)).second)
            throw DataError(name + ".header: duplicate column id " + m.col_ids[i]);

    const std::string tname = name + ".triples";
    for_each_record(triples, [&](std::string_view line, std::size_t no) {
        auto f = text::split(line, ',');
        if (f.size() != 3) bad(tname, no, "expected row_id,col_id,value");
        auto r = rows.find(std::string(f[0]));
        auto c = cols.find(std::string(f[1]));
        if (r == rows.end()) bad(tname, no, "row id not in header");
        if (c == cols.end()) bad(tname, no, "column id not in header");
        double v = 0;
        if (!text::parse_double(f[2], v) || !(v >= 0.0) || !std::isfinite(v)) bad(tname, no, "invalid value");
        m.cells.push_back({r->second, c->second, v});
    });
    std::sort(m.cells.begin(), m.cells.end(),
              [](const auto& a, const auto& b) { return std::tie(a.row, a.col) < std::tie(b.row, b.col); });
    for (std::size_t i = 1; i < m.cells.size(); ++i)
        if (m.cells[i].row == m.cells[i - 1].row && m.cells[i].col == m.cells[i - 1].col)
            throw DataError(tname + ": duplicate cell " + m.row_ids[m.cells[i].row] + "," +
                            m.col_ids[m.cells[i].col]);
    std::erase_if(m.cells, [](const auto& c) { return c.value == 0.0; });
    return m;
}

void write_matrix(const ContingencyMatrix& m, const std::filesystem::path& base, const Provenance* provenance) {
    if (base.has_parent_path()) std::filesystem::create_directories(base.parent_path());
    std::ofstream triples(with_suffix(base, ".triples"), std::ios::binary);
    std::ofstream header(with_suffix(base, ".header"), std::ios::binary);
    if (!triples || !header) throw DataError("cannot write " + base.string());
    write_matrix(m, triples, header, provenance);
}

ContingencyMatrix read_matrix(const std::filesystem::path& base) {
    std::ifstream triples(with_suffix(base, ".triples"));
    std::ifstream header(with_suffix(base, ".header"));
    if (!triples || !header) throw DataError("cannot open matrix " + base.string());
    return read_matrix(triples, header, base.string());
}

MatrixHeader read_matrix_header(const std::filesystem::path& base) {
    std::ifstream header(with_suffix(base, ".header"));
    if (!header) throw DataError("cannot open " + with_suffix(base, ".header").string());
    return read_matrix_header(header, with_suffix(base, ".header").string());
}

}  // namespace netcc
