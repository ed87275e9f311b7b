#include "anvil/report.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "anvil/errors.hpp"

namespace anvil {

namespace {

std::string fmt_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fmt_meters(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    return cells;
}

} // namespace

void emit_matrix_csv(const EvalMatrix& matrix, const std::filesystem::path& path) {
    if (matrix.cells.empty()) throw DataError("emit_matrix_csv: empty matrix");
    std::ofstream out(path);
    if (!out) throw DataError("cannot open for writing: " + path.string());
    out << "floorplan,framework,offline_device,online_device,mean_m,std_m,n_queries\n";
    for (const auto& c : matrix.cells) {
        out << matrix.floorplan_id << ',' << c.framework << ',' << c.offline_device << ','
            << c.online_device << ',' << fmt_double(c.stats.mean_m) << ','
            << fmt_double(c.stats.std_m) << ',' << c.stats.n_queries << "\n";
    }
    if (!out) throw DataError("write failed: " + path.string());
}

EvalMatrix load_matrix_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open: " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw DataError("empty report CSV: " + path.string());

    EvalMatrix matrix;
    std::set<std::string> frameworks, devices;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        auto cells = split_line(line);
        if (cells.size() != 7) {
            throw DataError(path.string() + ":" + std::to_string(lineno) +
                            ": expected 7 cells");
        }
        matrix.floorplan_id = cells[0];
        EvalCell c;
        c.framework = cells[1];
        c.offline_device = cells[2];
        c.online_device = cells[3];
        c.stats.mean_m = std::stod(cells[4]);
        c.stats.std_m = std::stod(cells[5]);
        c.stats.n_queries = std::stoul(cells[6]);
        frameworks.insert(c.framework);
        devices.insert(c.offline_device);
        devices.insert(c.online_device);
        matrix.cells.push_back(std::move(c));
    }
    matrix.frameworks.assign(frameworks.begin(), frameworks.end());
    matrix.devices.assign(devices.begin(), devices.end());
    return matrix;
}

void emit_matrix_markdown(const EvalMatrix& matrix, const std::filesystem::path& path) {
    if (matrix.cells.empty()) throw DataError("emit_matrix_markdown: empty matrix");
    std::ofstream out(path);
    if (!out) throw DataError("cannot open for writing: " + path.string());

    out << "# Cross-device localization errors (" << matrix.floorplan_id << ")\n\n";
    out << "Mean error in meters per offline (rows) x online (columns) device pair.\n";
    for (const auto& fw : matrix.frameworks) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -std::numeric_limits<double>::infinity();
        std::string lo_pair, hi_pair;
        out << "\n## " << fw << "\n\n| offline \\ online |";
        for (const auto& d : matrix.devices) out << ' ' << d << " |";
        out << "\n|---|";
        for (std::size_t i = 0; i < matrix.devices.size(); ++i) out << "---|";
        out << "\n";
        for (const auto& off : matrix.devices) {
            out << "| " << off << " |";
            for (const auto& on : matrix.devices) {
                const auto& c = matrix.cell(fw, off, on);
                out << ' ' << fmt_meters(c.stats.mean_m) << " |";
                if (c.stats.mean_m < lo) { lo = c.stats.mean_m; lo_pair = off + "->" + on; }
                if (c.stats.mean_m > hi) { hi = c.stats.mean_m; hi_pair = off + "->" + on; }
            }
            out << "\n";
        }
        out << "\nbest: " << fmt_meters(lo) << " m (" << lo_pair << "), worst: "
            << fmt_meters(hi) << " m (" << hi_pair << ")\n";
    }
    if (!out) throw DataError("write failed: " + path.string());
}

void emit_summary_csv(const std::vector<SummaryRow>& rows, const std::filesystem::path& path) {
    if (rows.empty()) throw DataError("emit_summary_csv: empty summary");
    std::ofstream out(path);
    if (!out) throw DataError("cannot open for writing: " + path.string());
    out << "floorplan,framework,mean_m,std_m\n";
    for (const auto& r : rows) {
        out << r.floorplan_id << ',' << r.framework << ',' << fmt_double(r.mean_m) << ','
            << fmt_double(r.std_m) << "\n";
    }
    if (!out) throw DataError("write failed: " + path.string());
}

void emit_summary_markdown(const std::vector<SummaryRow>& rows,
                           const std::filesystem::path& path) {
    if (rows.empty()) throw DataError("emit_summary_markdown: empty summary");
    std::ofstream out(path);
    if (!out) throw DataError("cannot open for writing: " + path.string());
    out << "# Summary: mean error across all device pairs\n\n";
    out << "| floorplan | framework | mean (m) | std (m) |\n|---|---|---|---|\n";
    for (const auto& r : rows) {
        out << "| " << r.floorplan_id << " | " << r.framework << " | "
            << fmt_meters(r.mean_m) << " | " << fmt_meters(r.std_m) << " |\n";
    }
    if (!out) throw DataError("write failed: " + path.string());
}

} // namespace anvil
