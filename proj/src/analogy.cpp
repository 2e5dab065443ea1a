#include "fairembed/analogy.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "fairembed/core.hpp"

namespace fairembed {

std::string analogy_complete(const Embedding& e, const std::string& a, const std::string& b,
                             const std::string& c) {
    const auto ia = e.find(a), ib = e.find(b), ic = e.find(c);
    if (!ia || !ib || !ic) throw DataError("analogy: query word missing from vocabulary");
    if (e.size() < 4) throw DataError("analogy: vocabulary too small");

    const auto& unit = e.unit_rows();
    const std::size_t d = e.dim();
    Vec query(d);
    for (std::size_t j = 0; j < d; ++j)
        query[j] = unit[*ib * d + j] - unit[*ia * d + j] + unit[*ic * d + j];

    double best = -1e300;
    std::size_t best_i = 0;
    bool found = false;
    for (std::size_t i = 0; i < e.size(); ++i) {
        if (i == *ia || i == *ib || i == *ic) continue;
        double s = 0.0;
        for (std::size_t j = 0; j < d; ++j) s += unit[i * d + j] * query[j];
        // Unit candidate rows make the denominator constant; ties break
        // toward the smaller vocabulary index.
        if (!found || s > best) {
            best = s;
            best_i = i;
            found = true;
        }
    }
    return e.vocab().word(best_i);
}

std::vector<AnalogyRow> load_analogy_section(const std::string& path, const std::string& section) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open analogy file: " + path);
    std::vector<AnalogyRow> rows;
    std::set<std::string> sections_seen;
    std::string line;
    bool in_section = false;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == ':') {
            std::string name = line.substr(1);
            const auto start = name.find_first_not_of(" \t");
            name = start == std::string::npos ? "" : name.substr(start);
            sections_seen.insert(name);
            in_section = name == section;
            continue;
        }
        if (!in_section) continue;
        std::istringstream fields(line);
        AnalogyRow row;
        std::string extra;
        if (!(fields >> row.a >> row.b >> row.c >> row.d) || (fields >> extra))
            throw DataError(path + ":" + std::to_string(lineno) + ": expected four words");
        rows.push_back(std::move(row));
    }
    if (!sections_seen.count(section)) {
        std::string known;
        for (const auto& s : sections_seen) known += (known.empty() ? "" : ", ") + s;
        throw DataError("unknown analogy subset '" + section + "' in " + path +
                        " (sections: " + known + ")");
    }
    return rows;
}

std::vector<WordPair> analogy_section_pairs(const std::vector<AnalogyRow>& rows) {
    std::vector<WordPair> pairs;
    std::set<std::pair<std::string, std::string>> seen;  // canonical unordered key
    auto add = [&](const std::string& x, const std::string& y) {
        const auto key = x < y ? std::make_pair(x, y) : std::make_pair(y, x);
        if (seen.insert(key).second) pairs.emplace_back(x, y);
    };
    for (const auto& row : rows) {
        add(row.a, row.b);
        add(row.c, row.d);
    }
    return pairs;
}

AnalogyReport run_analogy_suite(const Embedding& e, const std::vector<AnalogyRow>& rows) {
    AnalogyReport report;
    for (const auto& row : rows) {
        if (!e.find(row.a) || !e.find(row.b) || !e.find(row.c) || !e.find(row.d)) {
            ++report.skipped;
            continue;
        }
        ++report.total;
        if (analogy_complete(e, row.a, row.b, row.c) == row.d) ++report.correct;
    }
    report.empty_evaluation = report.total == 0;
    report.error_rate = report.total == 0
                            ? 0.0
                            : 100.0 * static_cast<double>(report.total - report.correct) /
                                  static_cast<double>(report.total);
    return report;
}

AnalogyReport family_analogy_suite(const Embedding& e, const std::string& dataset_path,
                                   const std::string& subset) {
    return run_analogy_suite(e, load_analogy_section(dataset_path, subset));
}

}  // namespace fairembed
