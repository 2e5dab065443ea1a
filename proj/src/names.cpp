#include "fairembed/names.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "fairembed/core.hpp"

namespace fairembed {

std::string titlecase(const std::string& s) {
    std::string out = s;
    bool first = true;
    for (auto& c : out) {
        const unsigned char uc = static_cast<unsigned char>(c);
        c = first ? static_cast<char>(std::toupper(uc)) : static_cast<char>(std::tolower(uc));
        first = false;
    }
    return out;
}

NamePairing::NamePairing(std::vector<std::pair<std::string, std::string>> pairs)
    : pairs_(std::move(pairs)) {
    for (const auto& [m, f] : pairs_) {
        if (!lookup_.emplace(m, f).second || !lookup_.emplace(f, m).second)
            throw DataError("name appears in more than one pair: " + m + "/" + f);
    }
}

const std::string* NamePairing::counterpart(const std::string& name) const {
    auto it = lookup_.find(name);
    return it == lookup_.end() ? nullptr : &it->second;
}

NameTable load_name_table(std::istream& in) {
    NameTable table;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::string name, sex, count_str;
        std::istringstream fields(line);
        if (!std::getline(fields, name, ',') || !std::getline(fields, sex, ',') ||
            !std::getline(fields, count_str))
            throw DataError("name CSV line " + std::to_string(lineno) + ": expected name,sex,count");
        // Optional header, detected on the first line only.
        if (lineno == 1 && sex.size() > 1) {
            std::string lower = sex;
            for (auto& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
            if (lower == "sex" || lower == "gender") continue;
        }
        if (name.empty()) throw DataError("name CSV line " + std::to_string(lineno) + ": empty name");
        if (sex != "M" && sex != "F")
            throw DataError("name CSV line " + std::to_string(lineno) + ": unknown sex code '" +
                            sex + "'");
        std::uint64_t count = 0;
        try {
            count = std::stoull(count_str);
        } catch (const std::exception&) {
            throw DataError("name CSV line " + std::to_string(lineno) + ": bad count '" +
                            count_str + "'");
        }
        const std::string key = titlecase(name);
        auto& rec = table.records[key];
        rec.name = key;
        if (sex == "M")
            rec.male_count += count;
        else
            rec.female_count += count;
    }
    return table;
}

NameTable load_name_table_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open name CSV: " + path);
    return load_name_table(in);
}

std::pair<PlanePoint, Gender> plane_point(const NameRecord& r) {
    PlanePoint p;
    // Ties count as male.
    const Gender g = r.female_count > r.male_count ? Gender::Female : Gender::Male;
    p.primary = static_cast<double>(std::max(r.male_count, r.female_count));
    p.secondary = static_cast<double>(std::min(r.male_count, r.female_count));
    return {p, g};
}

std::vector<std::vector<double>> build_cost_matrix(const std::vector<PlanePoint>& males,
                                                   const std::vector<PlanePoint>& females,
                                                   AxisTransform transform) {
    if (males.size() != females.size()) throw DataError("cost matrix requires equal group sizes");
    if (males.empty()) throw DataError("cost matrix requires at least one name per side");
    auto tx = [&](double v) { return transform == AxisTransform::Log1p ? std::log1p(v) : v; };
    const std::size_t n = males.size();
    std::vector<std::vector<double>> cost(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        const double px = tx(males[i].primary);
        const double py = tx(males[i].secondary);
        for (std::size_t j = 0; j < n; ++j) {
            const double dx = px - tx(females[j].primary);
            const double dy = py - tx(females[j].secondary);
            cost[i][j] = std::sqrt(dx * dx + dy * dy);
        }
    }
    return cost;
}

namespace {

// Kuhn augmenting search over tight edges, avoiding fixed columns.
bool augment_tight(std::size_t row, const std::vector<std::vector<std::size_t>>& tight,
                   const std::vector<char>& col_fixed, std::vector<std::size_t>& row_to_col,
                   std::vector<std::size_t>& col_to_row, std::vector<char>& visited,
                   std::size_t npos) {
    for (std::size_t j : tight[row]) {
        if (col_fixed[j] || visited[j]) continue;
        visited[j] = 1;
        if (col_to_row[j] == npos ||
            augment_tight(col_to_row[j], tight, col_fixed, row_to_col, col_to_row, visited, npos)) {
            row_to_col[row] = j;
            col_to_row[j] = row;
            return true;
        }
    }
    return false;
}

}  // namespace

AssignmentResult solve_assignment(const std::vector<std::vector<double>>& cost) {
    const std::size_t n = cost.size();
    if (n == 0) throw DataError("assignment: empty cost matrix");
    double max_abs = 0.0;
    for (const auto& row : cost) {
        if (row.size() != n) throw DataError("assignment: cost matrix not square");
        for (double c : row) {
            if (!std::isfinite(c)) throw NumericError("assignment: non-finite cost");
            max_abs = std::max(max_abs, std::abs(c));
        }
    }

    // Hungarian method with potentials, O(n^3).
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
    for (std::size_t i = 1; i <= n; ++i) {
        p[0] = i;
        std::size_t j0 = 0;
        std::vector<double> minv(n + 1, inf);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            const std::size_t i0 = p[j0];
            std::size_t j1 = 0;
            double delta = inf;
            for (std::size_t j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const std::size_t j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }

    const std::size_t npos = n;
    std::vector<std::size_t> row_to_col(n, npos), col_to_row(n, npos);
    for (std::size_t j = 1; j <= n; ++j) {
        row_to_col[p[j] - 1] = j - 1;
        col_to_row[j - 1] = p[j] - 1;
    }

    // Canonicalize to the lexicographically smallest co-optimal assignment.
    // Optimal assignments are exactly the perfect matchings over tight
    // edges (zero reduced cost), so rows are pinned in order to their
    // smallest feasible tight column.
    const double eps = 1e-9 * std::max(1.0, max_abs);
    std::vector<std::vector<std::size_t>> tight(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (cost[i][j] - u[i + 1] - v[j + 1] <= eps) tight[i].push_back(j);

    std::vector<char> col_fixed(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j : tight[i]) {
            if (col_fixed[j]) continue;
            if (j == row_to_col[i]) break;  // already the smallest reachable
            if (j > row_to_col[i]) break;   // tight columns are ascending
            // Try rerouting the current owner of j; row i's old column is
            // freed as the augmenting target.
            const std::size_t owner = col_to_row[j];
            const std::size_t old = row_to_col[i];
            row_to_col[i] = j;
            col_to_row[j] = i;
            row_to_col[owner] = npos;
            col_to_row[old] = npos;
            std::vector<char> visited(n, 0);
            visited[j] = 1;
            if (augment_tight(owner, tight, col_fixed, row_to_col, col_to_row, visited, npos)) {
                break;
            }
            // Rollback.
            row_to_col[i] = old;
            col_to_row[old] = i;
            row_to_col[owner] = j;
            col_to_row[j] = owner;
        }
        col_fixed[row_to_col[i]] = 1;
    }

    AssignmentResult result;
    result.row_to_col = std::move(row_to_col);
    for (std::size_t i = 0; i < n; ++i) result.total_cost += cost[i][result.row_to_col[i]];
    return result;
}

NamePairing match_names(const NameTable& table, std::size_t n_per_gender, AxisTransform transform) {
    struct Entry {
        const NameRecord* rec;
        PlanePoint point;
    };
    std::vector<Entry> males, females;
    for (const auto& [name, rec] : table.records) {
        if (rec.total() == 0) continue;
        auto [point, gender] = plane_point(rec);
        if (gender == Gender::Male)
            males.push_back({&rec, point});
        else
            females.push_back({&rec, point});
    }
    if (males.size() < n_per_gender || females.size() < n_per_gender)
        throw DataError("not enough names: need " + std::to_string(n_per_gender) +
                        " per gender, have " + std::to_string(males.size()) + " male / " +
                        std::to_string(females.size()) + " female");

    // Top-n by total count, ties by name.
    auto by_total = [](const Entry& a, const Entry& b) {
        if (a.rec->total() != b.rec->total()) return a.rec->total() > b.rec->total();
        return a.rec->name < b.rec->name;
    };
    std::sort(males.begin(), males.end(), by_total);
    std::sort(females.begin(), females.end(), by_total);
    males.resize(n_per_gender);
    females.resize(n_per_gender);

    std::vector<PlanePoint> mp, fp;
    for (const auto& e : males) mp.push_back(e.point);
    for (const auto& e : females) fp.push_back(e.point);
    const auto assignment = solve_assignment(build_cost_matrix(mp, fp, transform));

    // Male side is already in descending total-count order, which fixes
    // the gazetteer ordering.
    std::vector<std::pair<std::string, std::string>> pairs;
    pairs.reserve(n_per_gender);
    for (std::size_t i = 0; i < n_per_gender; ++i)
        pairs.emplace_back(males[i].rec->name, females[assignment.row_to_col[i]].rec->name);
    return NamePairing(std::move(pairs));
}

void save_pairing(const NamePairing& pairing, std::ostream& out) {
    for (const auto& [m, f] : pairing.pairs()) out << m << '\t' << f << '\n';
}

void save_pairing_file(const NamePairing& pairing, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write pairing file: " + path);
    save_pairing(pairing, out);
}

NamePairing load_pairing(std::istream& in) {
    std::vector<std::pair<std::string, std::string>> pairs;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos)
            throw DataError("pairing line " + std::to_string(lineno) + ": expected male<TAB>female");
        pairs.emplace_back(line.substr(0, tab), line.substr(tab + 1));
    }
    return NamePairing(std::move(pairs));
}

NamePairing load_pairing_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open pairing file: " + path);
    return load_pairing(in);
}

}  // namespace fairembed
