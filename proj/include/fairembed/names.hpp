#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

namespace fairembed {

enum class Gender { Male, Female };

struct NameRecord {
    std::string name;  // Titlecase
    std::uint64_t male_count = 0;
    std::uint64_t female_count = 0;

    std::uint64_t total() const { return male_count + female_count; }
};

// Aggregated name/sex occurrence counts (SSA-style data).
struct NameTable {
    std::map<std::string, NameRecord> records;  // keyed by Titlecase name
};

struct PlanePoint {
    double primary = 0.0;    // count of the name's more frequent gender
    double secondary = 0.0;  // count of the other gender
};

// Fixed male<->female bijection used for counterfactual name swapping.
class NamePairing {
public:
    NamePairing() = default;
    explicit NamePairing(std::vector<std::pair<std::string, std::string>> pairs);

    const std::vector<std::pair<std::string, std::string>>& pairs() const { return pairs_; }
    // Counterpart of a Titlecase name; empty if unpaired.
    const std::string* counterpart(const std::string& name) const;
    bool contains(const std::string& name) const { return lookup_.count(name) != 0; }
    std::size_t size() const { return pairs_.size(); }

private:
    std::vector<std::pair<std::string, std::string>> pairs_;  // (male, female)
    std::unordered_map<std::string, std::string> lookup_;     // symmetric
};

enum class AxisTransform { Raw, Log1p };

std::string titlecase(const std::string& s);

// CSV "name,sex,count" with optional header; repeated rows are summed.
NameTable load_name_table(std::istream& in);
NameTable load_name_table_file(const std::string& path);

// Primary gender = the more frequent one; exact ties count as male.
std::pair<PlanePoint, Gender> plane_point(const NameRecord& r);

// cost[i][j] = Euclidean distance between transformed male i / female j.
std::vector<std::vector<double>> build_cost_matrix(const std::vector<PlanePoint>& males,
                                                   const std::vector<PlanePoint>& females,
                                                   AxisTransform transform);

// Minimum-cost perfect matching (Hungarian method with potentials).
// Returns row -> column; deterministic: lexicographically smallest
// assignment among co-optimal solutions.
struct AssignmentResult {
    std::vector<std::size_t> row_to_col;
    double total_cost = 0.0;
};
AssignmentResult solve_assignment(const std::vector<std::vector<double>>& cost);

// Top-n names per primary gender by total count (ties by name), matched by
// the Hungarian method over plane-point distances.
NamePairing match_names(const NameTable& table, std::size_t n_per_gender = 2500,
                        AxisTransform transform = AxisTransform::Log1p);

// Gazetteer TSV "male<TAB>female", ordered by descending male total count
// at save time.
void save_pairing(const NamePairing& pairing, std::ostream& out);
void save_pairing_file(const NamePairing& pairing, const std::string& path);
NamePairing load_pairing(std::istream& in);
NamePairing load_pairing_file(const std::string& path);

}  // namespace fairembed
