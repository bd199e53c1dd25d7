#include "vinedist/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "vinedist/errors.hpp"

namespace vinedist {

namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

std::string vine_to_text(const VineSpec& r) {
    const int d = r.dim();
    std::ostringstream os;
    os << "{\n  \"d\": " << d << ",\n";
    os << "  \"structure\": [\n";
    for (int i = 1; i <= d; ++i) {
        os << "    [";
        for (int j = 1; j <= d; ++j)
            os << (j > 1 ? ", " : "") << (j <= i ? r.structure().at(i, j) : 0);
        os << (i < d ? "],\n" : "]\n");
    }
    os << "  ],\n  \"families\": [\n";
    for (int i = 1; i <= d; ++i) {
        os << "    [";
        for (int j = 1; j <= d; ++j) {
            os << (j > 1 ? ", " : "");
            if (j < i)
                os << '"' << family_code(r.pair(i, j)) << '"';
            else
                os << "\"\"";
        }
        os << (i < d ? "],\n" : "]\n");
    }
    const auto par_block = [&](auto get) {
        std::ostringstream ps;
        for (int i = 1; i <= d; ++i) {
            ps << "    [";
            for (int j = 1; j <= d; ++j)
                ps << (j > 1 ? ", " : "") << (j < i ? fmt17(get(i, j)) : "0");
            ps << (i < d ? "],\n" : "]\n");
        }
        return ps.str();
    };
    os << "  ],\n  \"par1\": [\n"
       << par_block([&](int i, int j) { return r.pair(i, j).p1; });
    os << "  ],\n  \"par2\": [\n"
       << par_block([&](int i, int j) { return r.pair(i, j).p2; });
    os << "  ]\n}\n";
    return os.str();
}

VineSpec vine_from_text(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const std::exception& e) {
        throw Error(ErrorKind::Parse, std::string("vine file: invalid JSON: ") + e.what());
    }
    const auto need = [&](const char* field) -> const nlohmann::json& {
        if (!doc.contains(field))
            throw Error(ErrorKind::Parse, std::string("vine file: missing field '") + field + "'");
        return doc[field];
    };
    const int d = [&] {
        const auto& j = need("d");
        if (!j.is_number_integer())
            throw Error(ErrorKind::Parse, "vine file: field 'd' must be an integer");
        return j.get<int>();
    }();
    if (d < 2) throw Error(ErrorKind::Parse, "vine file: d must be >= 2");

    const auto matrix_rows = [&](const char* field) {
        const auto& j = need(field);
        if (!j.is_array() || static_cast<int>(j.size()) != d)
            throw Error(ErrorKind::Parse,
                        std::string("vine file: '") + field + "' must be a list of " +
                            std::to_string(d) + " rows");
        for (const auto& row : j)
            if (!row.is_array() || static_cast<int>(row.size()) != d)
                throw Error(ErrorKind::Parse, std::string("vine file: '") + field +
                                                  "' rows must have length " + std::to_string(d));
        return j;
    };

    StructureMatrix m(d, 0);
    {
        const auto& js = matrix_rows("structure");
        for (int i = 1; i <= d; ++i)
            for (int j = 1; j <= d; ++j) {
                const auto& cell = js[i - 1][j - 1];
                if (!cell.is_number_integer())
                    throw Error(ErrorKind::Parse, "vine file: structure entries must be integers");
                m.at(i, j) = cell.get<int>();
            }
    }
    const auto& jf = matrix_rows("families");
    const auto& jp1 = matrix_rows("par1");
    const auto& jp2 = matrix_rows("par2");

    TriMat<PairCopula> pairs(d);
    for (int i = 2; i <= d; ++i) {
        for (int j = 1; j < i; ++j) {
            const auto& fam = jf[i - 1][j - 1];
            if (!fam.is_string())
                throw Error(ErrorKind::Parse, "vine file: family codes must be strings");
            const std::string code = fam.get<std::string>();
            if (code.empty() || code == "0")
                throw Error(ErrorKind::Parse, "vine file: missing family code at slot (" +
                                                  std::to_string(i) + "," + std::to_string(j) + ")");
            const double p1 = jp1[i - 1][j - 1].get<double>();
            const double p2 = jp2[i - 1][j - 1].get<double>();
            try {
                pairs.at(i, j) = pair_from_code(code, p1, p2);
            } catch (const Error& e) {
                throw Error(e.kind(), "slot (" + std::to_string(i) + "," + std::to_string(j) +
                                          "): " + e.what());
            }
        }
    }
    return VineSpec(std::move(m), std::move(pairs));  // validates structure + ranges
}

void write_vine_file(const VineSpec& r, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorKind::Parse, "cannot open '" + path + "' for writing");
    out << vine_to_text(r);
}

VineSpec parse_vine_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Parse, "cannot open vine file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return vine_from_text(ss.str());
}

std::string report_to_text(const DistanceReport& rep) {
    std::ostringstream os;
    os << "{\n  \"method\": \"" << rep.method << "\",\n";
    os << "  \"value\": " << fmt17(rep.value) << ",\n";
    os << "  \"params\": {";
    bool first = true;
    const auto field = [&](const char* k, const std::string& v) {
        os << (first ? "" : ", ") << '"' << k << "\": " << v;
        first = false;
    };
    if (rep.n > 0) field("n", std::to_string(rep.n));
    if (rep.beta > 0) field("beta", fmt17(rep.beta));
    if (rep.a > 0) field("a", fmt17(rep.a));
    if (rep.tol > 0) field("tol", fmt17(rep.tol));
    if (rep.n_mc > 0) {
        field("n_mc", std::to_string(rep.n_mc));
        field("seed", std::to_string(rep.seed));
    }
    os << "},\n";
    os << "  \"evaluations\": " << rep.evaluations;
    if (!rep.note.empty()) os << ",\n  \"note\": \"" << rep.note << '"';
    os << "\n}\n";
    return os.str();
}

std::string study_to_text(const StudyResult& res) {
    nlohmann::ordered_json j;
    j["table"] = res.table;
    j["title"] = res.title;
    j["scale"] = res.scale;
    j["columns"] = res.columns;
    auto rows = nlohmann::ordered_json::array();
    for (const auto& row : res.rows) {
        nlohmann::ordered_json r;
        r["label"] = row.label;
        auto cells = nlohmann::ordered_json::array();
        for (const auto& c : row.cells) {
            nlohmann::ordered_json cj;
            if (c.present())
                cj["value"] = c.value;
            else
                cj["value"] = nullptr;
            if (!std::isnan(c.time_s)) cj["time_s"] = c.time_s;
            if (!c.note.empty()) cj["note"] = c.note;
            cells.push_back(std::move(cj));
        }
        r["cells"] = std::move(cells);
        rows.push_back(std::move(r));
    }
    j["rows"] = std::move(rows);
    if (!res.rank_correlations.empty()) {
        nlohmann::ordered_json rc;
        for (const auto& [k, v] : res.rank_correlations) rc[k] = v;
        j["rank_correlations"] = std::move(rc);
    }
    j["seeds"] = res.seeds;
    return j.dump(2) + "\n";
}

std::string render_study_table(const StudyResult& res) {
    const std::size_t ncol = res.columns.size();
    std::vector<std::vector<std::string>> cells;
    std::vector<std::string> head;
    head.push_back(res.table);
    for (const auto& c : res.columns) head.push_back(c);
    cells.push_back(head);
    for (const auto& row : res.rows) {
        std::vector<std::string> line;
        line.push_back(row.label);
        for (std::size_t c = 0; c < ncol; ++c) {
            if (c < row.cells.size() && row.cells[c].present()) {
                char buf[64];
                if (!std::isnan(row.cells[c].time_s))
                    std::snprintf(buf, sizeof(buf), "%.3f (%.1fs)", row.cells[c].value,
                                  row.cells[c].time_s);
                else
                    std::snprintf(buf, sizeof(buf), "%.3f", row.cells[c].value);
                line.push_back(buf);
            } else if (c < row.cells.size() && !row.cells[c].note.empty()) {
                line.push_back(row.cells[c].note);
            } else {
                line.push_back("--");
            }
        }
        cells.push_back(std::move(line));
    }
    std::vector<std::size_t> width(ncol + 1, 0);
    for (const auto& line : cells)
        for (std::size_t c = 0; c < line.size(); ++c)
            width[c] = std::max(width[c], line[c].size());
    std::ostringstream os;
    os << res.title << " [" << res.scale << "]\n";
    for (const auto& line : cells) {
        for (std::size_t c = 0; c < line.size(); ++c) {
            os << line[c];
            if (c + 1 < line.size())
                os << std::string(width[c] - line[c].size() + 2, ' ');
        }
        os << "\n";
    }
    return os.str();
}

}  // namespace vinedist
