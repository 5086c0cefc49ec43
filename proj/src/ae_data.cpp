#include "aeca/ae_data.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>

#include "aeca/delimited.hpp"
#include "aeca/error.hpp"

namespace aeca {

std::string_view to_string(ClassLevel level) noexcept {
    switch (level) {
        case ClassLevel::Grade: return "grade";
        case ClassLevel::Domain: return "domain";
        case ClassLevel::DomainGrade: return "domain_grade";
        case ClassLevel::Term: return "term";
        case ClassLevel::TermGrade: return "term_grade";
    }
    return "grade";
}

ClassLevel parse_level(std::string_view text) {
    const std::string key = to_lower(trim(text));
    if (key == "grade") return ClassLevel::Grade;
    if (key == "domain") return ClassLevel::Domain;
    if (key == "domain_grade" || key == "domain+grade" || key == "domaingrade") return ClassLevel::DomainGrade;
    if (key == "term") return ClassLevel::Term;
    if (key == "term_grade" || key == "term+grade" || key == "termgrade") return ClassLevel::TermGrade;
    throw Error(ErrorCode::InvalidConfig, "unknown class level '" + std::string(text) + "'");
}

bool level_needs_domain(ClassLevel level) noexcept {
    return level == ClassLevel::Domain || level == ClassLevel::DomainGrade;
}

bool level_needs_term(ClassLevel level) noexcept {
    return level == ClassLevel::Term || level == ClassLevel::TermGrade;
}

std::string class_label(ClassLevel level, int grade, const std::optional<std::string>& domain,
                        const std::optional<std::string>& term) {
    const std::string g = "G" + std::to_string(grade);
    switch (level) {
        case ClassLevel::Grade: return g;
        case ClassLevel::Domain: return domain.value_or("");
        case ClassLevel::DomainGrade: return domain.value_or("") + ":" + g;
        case ClassLevel::Term: return term.value_or("");
        case ClassLevel::TermGrade: return term.value_or("") + ":" + g;
    }
    return g;
}

ColumnMap canonical_columns() {
    return ColumnMap{"patient_id", "group", "grade", "domain", "term", "cycle"};
}

namespace {

std::optional<int> parse_int(std::string_view text) {
    int value = 0;
    const auto* first = text.data();
    const auto* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{}) return std::nullopt;
    // tolerate "3.0" as exported by some spreadsheet tools
    if (ptr != last) {
        std::string_view rest(ptr, static_cast<std::size_t>(last - ptr));
        if (rest.front() != '.' || rest.find_first_not_of('0', 1) != std::string_view::npos) return std::nullopt;
    }
    return value;
}

std::optional<std::size_t> find_column(const std::vector<std::string>& header, const std::string& name) {
    const std::string key = to_lower(trim(name));
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (to_lower(header[i]) == key) return i;
    }
    return std::nullopt;
}

std::size_t require_column(const std::vector<std::string>& header, const std::string& name, std::string_view role) {
    if (trim(name).empty()) {
        throw Error(ErrorCode::MissingColumn, "no column bound for " + std::string(role));
    }
    auto idx = find_column(header, name);
    if (!idx) throw Error(ErrorCode::MissingColumn, "column '" + name + "' (" + std::string(role) + ") not in header");
    return *idx;
}

std::optional<std::size_t> optional_column(const std::vector<std::string>& header, const std::string& name,
                                           std::string_view role) {
    if (trim(name).empty()) return std::nullopt;
    return require_column(header, name, role);
}

std::string cell(const DelimitedRow& row, std::optional<std::size_t> idx) {
    if (!idx || *idx >= row.fields.size()) return {};
    return trim(row.fields[*idx]);
}

// Groups in first-appearance order, keyed case-insensitively.
struct GroupIndex {
    std::vector<std::string> labels;
    std::vector<std::set<std::string>> patients;
    std::unordered_map<std::string, std::size_t> by_key;

    std::size_t add(const std::string& label) {
        auto [it, inserted] = by_key.emplace(to_lower(label), labels.size());
        if (inserted) {
            labels.push_back(label);
            patients.emplace_back();
        }
        return it->second;
    }
    std::optional<std::size_t> find(const std::string& label) const {
        auto it = by_key.find(to_lower(label));
        if (it == by_key.end()) return std::nullopt;
        return it->second;
    }
};

GroupIndex read_roster(std::string_view text) {
    DelimitedTable table = read_delimited(text);
    if (table.header.size() < 2) throw Error(ErrorCode::MissingColumn, "roster needs two columns (patient_id, group)");
    GroupIndex groups;
    for (const auto& row : table.rows) {
        const std::string patient = cell(row, 0);
        const std::string group = cell(row, 1);
        if (patient.empty() || group.empty()) continue;
        groups.patients[groups.add(group)].insert(patient);
    }
    return groups;
}

void finish_groups(Dataset& d, GroupIndex& groups, const std::vector<std::string>& explicit_order) {
    std::vector<std::size_t> order;
    std::vector<bool> used(groups.labels.size(), false);
    for (const auto& name : explicit_order) {
        auto idx = groups.find(trim(name));
        if (!idx) throw Error(ErrorCode::InvalidConfig, "group '" + name + "' in explicit order not present in data");
        if (!used[*idx]) {
            order.push_back(*idx);
            used[*idx] = true;
        }
    }
    for (std::size_t g = 0; g < groups.labels.size(); ++g) {
        if (!used[g]) order.push_back(g);
    }
    std::vector<std::size_t> new_index(order.size());
    for (std::size_t pos = 0; pos < order.size(); ++pos) {
        new_index[order[pos]] = pos;
        d.groups.push_back(groups.labels[order[pos]]);
        d.roster.emplace_back(groups.patients[order[pos]].begin(), groups.patients[order[pos]].end());
        d.patients_per_group.push_back(d.roster.back().size());
    }
    for (auto& rec : d.records) {
        rec.group_index = new_index[rec.group_index];
        rec.group = d.groups[rec.group_index];
    }
}

void check_shape(const Dataset& d) {
    if (d.records.empty()) throw Error(ErrorCode::EmptyDataset, "no valid adverse-event records");
    if (d.groups.size() < 2) {
        throw Error(ErrorCode::SingleGroup, "need at least two groups, found " + std::to_string(d.groups.size()));
    }
}

}  // namespace

ParseResult parse_dataset(std::string_view source, const ColumnMap& columns, const ParseOptions& options) {
    const DelimitedTable table = read_delimited(source);

    const auto patient_col = require_column(table.header, columns.patient, "patient");
    const auto group_col = require_column(table.header, columns.group, "group");
    const auto grade_col = require_column(table.header, columns.grade, "grade");
    const auto domain_col = optional_column(table.header, columns.domain, "domain");
    const auto term_col = optional_column(table.header, columns.term, "term");
    const auto cycle_col = optional_column(table.header, columns.cycle, "cycle");

    ParseResult out;
    Dataset& d = out.dataset;
    d.has_domain = domain_col.has_value();
    d.has_term = term_col.has_value();
    d.has_cycle = cycle_col.has_value();

    const bool roster_mode = options.roster_text.has_value();
    GroupIndex groups = roster_mode ? read_roster(*options.roster_text) : GroupIndex{};

    auto reject = [&](const DelimitedRow& row, std::string reason) {
        out.rejected.push_back(RejectedRow{row.line, std::move(reason)});
    };

    for (const auto& row : table.rows) {
        const std::string patient = cell(row, patient_col);
        const std::string group = cell(row, group_col);
        if (patient.empty()) {
            reject(row, "empty patient id");
            continue;
        }
        if (group.empty()) {
            reject(row, "empty group");
            continue;
        }

        std::size_t gidx = 0;
        if (roster_mode) {
            auto found = groups.find(group);
            if (!found) {
                reject(row, "group '" + group + "' not in roster");
                continue;
            }
            if (!groups.patients[*found].count(patient)) {
                reject(row, "patient '" + patient + "' not in roster for group '" + group + "'");
                continue;
            }
            gidx = *found;
        } else {
            gidx = groups.add(group);
            groups.patients[gidx].insert(patient);
        }

        const std::string grade_text = cell(row, grade_col);
        const std::string domain = cell(row, domain_col);
        const std::string term = cell(row, term_col);
        const std::string cycle_text = cell(row, cycle_col);

        if (grade_text.empty() && domain.empty() && term.empty()) continue;  // patient without AE
        if (grade_text.empty()) {
            reject(row, "missing grade");
            continue;
        }
        const auto grade = parse_int(grade_text);
        if (!grade || *grade < 1 || *grade > 5) {
            reject(row, "BadGrade: grade '" + grade_text + "' outside 1..5");
            continue;
        }
        std::optional<int> cycle;
        if (!cycle_text.empty()) {
            cycle = parse_int(cycle_text);
            if (!cycle || *cycle < 0) {
                reject(row, "cycle '" + cycle_text + "' is not a non-negative integer");
                continue;
            }
        }
        if (*grade < options.min_grade) continue;

        AERecord rec;
        rec.patient_id = patient;
        rec.group_index = gidx;
        rec.grade = *grade;
        if (!domain.empty()) rec.domain = domain;
        if (!term.empty()) rec.term = term;
        rec.cycle = cycle;
        rec.source_line = row.line;
        d.records.push_back(std::move(rec));
    }

    finish_groups(d, groups, options.group_order);
    check_shape(d);
    return out;
}

Dataset filter_cycle(const Dataset& d, int cycle) {
    if (!d.has_cycle) throw Error(ErrorCode::MissingField, "dataset has no cycle column");
    std::vector<bool> keep_group(d.groups.size(), false);
    for (const auto& rec : d.records) {
        if (rec.cycle && *rec.cycle == cycle) keep_group[rec.group_index] = true;
    }

    Dataset out;
    out.has_domain = d.has_domain;
    out.has_term = d.has_term;
    out.has_cycle = d.has_cycle;
    std::vector<std::size_t> new_index(d.groups.size(), 0);
    for (std::size_t g = 0; g < d.groups.size(); ++g) {
        if (!keep_group[g]) continue;
        new_index[g] = out.groups.size();
        out.groups.push_back(d.groups[g]);
        out.roster.push_back(d.roster[g]);
        out.patients_per_group.push_back(d.patients_per_group[g]);
    }
    for (const auto& rec : d.records) {
        if (!rec.cycle || *rec.cycle != cycle) continue;
        AERecord copy = rec;
        copy.group_index = new_index[rec.group_index];
        out.records.push_back(std::move(copy));
    }
    if (out.records.empty()) {
        throw Error(ErrorCode::EmptyDataset, "no records at cycle " + std::to_string(cycle));
    }
    check_shape(out);
    return out;
}

Dataset filter_min_grade(const Dataset& d, int min_grade) {
    Dataset out = d;
    std::erase_if(out.records, [&](const AERecord& r) { return r.grade < min_grade; });
    if (out.records.empty()) throw Error(ErrorCode::EmptyDataset, "no records at or above the minimum grade");
    return out;
}

std::string write_dataset(const Dataset& d) {
    std::ostringstream os;
    os << "patient_id,group,grade,domain,term,cycle\n";
    for (std::size_t g = 0; g < d.groups.size(); ++g) {
        std::set<std::string> with_records;
        const std::string group = quote_field(d.groups[g], ',');
        for (const auto& rec : d.records) {
            if (rec.group_index != g) continue;
            with_records.insert(rec.patient_id);
            os << quote_field(rec.patient_id, ',') << ',' << group << ',' << rec.grade << ','
               << quote_field(rec.domain.value_or(""), ',') << ',' << quote_field(rec.term.value_or(""), ',') << ',';
            if (rec.cycle) os << *rec.cycle;
            os << '\n';
        }
        for (const auto& patient : d.roster[g]) {
            if (!with_records.count(patient)) os << quote_field(patient, ',') << ',' << group << ",,,,\n";
        }
    }
    return os.str();
}

ClassAssignment derive_classes(const Dataset& d, ClassLevel level) {
    struct Entry {
        std::string display;
        std::size_t exemplar = 0;  // record supplying the display spelling
    };
    std::map<std::string, Entry> by_key;
    std::vector<std::string> keys;
    keys.reserve(d.records.size());

    for (std::size_t r = 0; r < d.records.size(); ++r) {
        const auto& rec = d.records[r];
        if (level_needs_domain(level) && !rec.domain) {
            throw Error(ErrorCode::MissingField,
                        "record at line " + std::to_string(rec.source_line) + " has no domain");
        }
        if (level_needs_term(level) && !rec.term) {
            throw Error(ErrorCode::MissingField, "record at line " + std::to_string(rec.source_line) + " has no term");
        }
        std::string label = class_label(level, rec.grade, rec.domain, rec.term);
        std::string key = to_lower(label);
        auto [it, inserted] = by_key.try_emplace(key, Entry{label, r});
        if (!inserted && label < it->second.display) it->second = Entry{label, r};
        keys.push_back(std::move(key));
    }

    ClassAssignment out;
    std::map<std::string, std::size_t> index;
    for (const auto& [key, entry] : by_key) {
        const auto& rec = d.records[entry.exemplar];
        AEClass cls;
        cls.label = entry.display;
        cls.level = level;
        if (level == ClassLevel::Grade || level == ClassLevel::DomainGrade || level == ClassLevel::TermGrade) {
            cls.grade = rec.grade;
        }
        if (level_needs_domain(level)) cls.domain = rec.domain;
        if (level_needs_term(level)) cls.term = rec.term;
        index.emplace(key, out.classes.size());
        out.classes.push_back(std::move(cls));
    }
    out.record_class.reserve(keys.size());
    for (const auto& key : keys) out.record_class.push_back(index.at(key));
    return out;
}

}  // namespace aeca
