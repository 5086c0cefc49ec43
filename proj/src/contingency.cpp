#include "aeca/contingency.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <set>
#include <sstream>
#include <unordered_set>

#include "aeca/delimited.hpp"
#include "aeca/error.hpp"

namespace aeca {

Eigen::MatrixXd StackedTable::correspondence() const {
    return profiles * col_masses.asDiagonal();
}

std::vector<std::string> StackedTable::row_labels() const {
    std::vector<std::string> out;
    out.reserve(2 * classes.size());
    for (const auto& cls : classes) {
        out.push_back(cls.label);
        out.push_back(cls.label + std::string(kComplementSuffix));
    }
    return out;
}

Eigen::MatrixXd StackedTable::stacked_counts() const {
    const auto I = pi.rows();
    Eigen::MatrixXd out(2 * I, pi.cols());
    for (Eigen::Index i = 0; i < I; ++i) {
        out.row(2 * i) = pi.row(i);
        out.row(2 * i + 1) = (1.0 - pi.row(i).array()).matrix();
    }
    return out;
}

bool is_degenerate_row(const Eigen::Ref<const Eigen::RowVectorXd>& pi_row) {
    const double first = pi_row(0);
    if (first != 0.0 && first != 1.0) return false;
    return (pi_row.array() == first).all();
}

namespace {

StackedTable assemble(std::vector<AEClass> classes, std::vector<std::string> groups, Eigen::MatrixXd pi) {
    StackedTable t;
    const auto I = pi.rows();
    const auto J = pi.cols();
    t.classes = std::move(classes);
    t.groups = std::move(groups);
    t.pi = std::move(pi);

    t.profiles.resize(2 * I, J);
    for (Eigen::Index i = 0; i < I; ++i) {
        for (Eigen::Index j = 0; j < J; ++j) {
            t.profiles(2 * i, j) = t.pi(i, j) / static_cast<double>(I);
            t.profiles(2 * i + 1, j) = (1.0 - t.pi(i, j)) / static_cast<double>(I);
        }
    }
    t.col_masses = Eigen::VectorXd::Constant(J, 1.0 / static_cast<double>(J));
    t.row_masses = t.profiles * t.col_masses;
    t.avg_frequency = t.pi.rowwise().mean();

    t.degenerate.resize(static_cast<std::size_t>(I));
    Eigen::Index retained = 0;
    for (Eigen::Index i = 0; i < I; ++i) {
        t.degenerate[static_cast<std::size_t>(i)] = is_degenerate_row(t.pi.row(i));
        if (!t.degenerate[static_cast<std::size_t>(i)]) ++retained;
    }
    // Closed-form total inertia over retained classes (I counts retained classes only).
    double sum = 0.0;
    for (Eigen::Index i = 0; i < I; ++i) {
        if (t.degenerate[static_cast<std::size_t>(i)]) continue;
        const double mean = t.avg_frequency(i);
        const double denom = mean * (1.0 - mean);
        for (Eigen::Index j = 0; j < J; ++j) {
            const double dev = t.pi(i, j) - mean;
            sum += dev * dev / denom;
        }
    }
    t.total_inertia = retained > 0 ? sum / static_cast<double>(retained * J) : 0.0;
    return t;
}

}  // namespace

StackedTable build_stacked(const Dataset& d, ClassLevel level) {
    ClassAssignment assignment = derive_classes(d, level);
    const auto I = static_cast<Eigen::Index>(assignment.classes.size());
    const auto J = static_cast<Eigen::Index>(d.groups.size());

    // distinct (class, group, patient) triples; repeated AEs of a class count once
    std::vector<std::vector<std::unordered_set<std::string>>> seen(
        static_cast<std::size_t>(I), std::vector<std::unordered_set<std::string>>(static_cast<std::size_t>(J)));
    for (std::size_t r = 0; r < d.records.size(); ++r) {
        const auto& rec = d.records[r];
        seen[assignment.record_class[r]][rec.group_index].insert(rec.patient_id);
    }

    Eigen::MatrixXd pi(I, J);
    for (Eigen::Index i = 0; i < I; ++i) {
        for (Eigen::Index j = 0; j < J; ++j) {
            const auto n = seen[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)].size();
            const auto roster = d.patients_per_group[static_cast<std::size_t>(j)];
            if (n > roster) {
                throw Error(ErrorCode::OutOfRange, "class " + assignment.classes[static_cast<std::size_t>(i)].label +
                                                       " has more patients than group " + d.groups[static_cast<std::size_t>(j)]);
            }
            pi(i, j) = static_cast<double>(n) / static_cast<double>(roster);
        }
    }
    return assemble(std::move(assignment.classes), d.groups, std::move(pi));
}

StackedTable from_pi_matrix(const Eigen::MatrixXd& pi, const std::vector<std::string>& class_labels,
                            const std::vector<std::string>& group_labels, ClassLevel level) {
    if (static_cast<std::size_t>(pi.rows()) != class_labels.size() ||
        static_cast<std::size_t>(pi.cols()) != group_labels.size()) {
        throw Error(ErrorCode::DimensionMismatch, "pi matrix is " + std::to_string(pi.rows()) + "x" +
                                                      std::to_string(pi.cols()) + " but labels are " +
                                                      std::to_string(class_labels.size()) + "x" +
                                                      std::to_string(group_labels.size()));
    }
    if (pi.rows() == 0) throw Error(ErrorCode::EmptyDataset, "pi matrix has no classes");
    if (pi.cols() < 2) throw Error(ErrorCode::SingleGroup, "pi matrix needs at least two groups");
    for (Eigen::Index i = 0; i < pi.rows(); ++i) {
        for (Eigen::Index j = 0; j < pi.cols(); ++j) {
            const double v = pi(i, j);
            if (!(v >= 0.0 && v <= 1.0)) {
                throw Error(ErrorCode::OutOfRange, "pi(" + class_labels[static_cast<std::size_t>(i)] + ", " +
                                                       group_labels[static_cast<std::size_t>(j)] + ") = " +
                                                       std::to_string(v) + " outside [0,1]");
            }
        }
    }
    auto check_unique = [](const std::vector<std::string>& labels, std::string_view what) {
        std::set<std::string> keys;
        for (const auto& l : labels) {
            if (!keys.insert(to_lower(l)).second) {
                throw Error(ErrorCode::DuplicateLabel, "duplicate " + std::string(what) + " label '" + l + "'");
            }
        }
    };
    check_unique(class_labels, "class");
    check_unique(group_labels, "group");

    std::vector<AEClass> classes;
    classes.reserve(class_labels.size());
    for (const auto& label : class_labels) classes.push_back(AEClass{label, level, std::nullopt, std::nullopt, std::nullopt});
    return assemble(std::move(classes), group_labels, pi);
}

PiMatrixImport read_pi_matrix(std::string_view text) {
    const DelimitedTable table = read_delimited(text);
    if (table.header.size() < 3) {
        throw Error(ErrorCode::DimensionMismatch, "pi table needs a label column and at least two group columns");
    }
    PiMatrixImport out;
    out.group_labels.assign(table.header.begin() + 1, table.header.end());
    const auto J = static_cast<Eigen::Index>(out.group_labels.size());
    out.pi.resize(static_cast<Eigen::Index>(table.rows.size()), J);

    double max_value = 0.0;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        if (row.fields.size() != table.header.size()) {
            throw Error(ErrorCode::DimensionMismatch,
                        "line " + std::to_string(row.line) + ": expected " + std::to_string(table.header.size()) + " fields");
        }
        out.class_labels.push_back(trim(row.fields[0]));
        for (Eigen::Index j = 0; j < J; ++j) {
            const std::string s = trim(row.fields[static_cast<std::size_t>(j) + 1]);
            double v = 0.0;
            auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
            if (ec != std::errc{} || ptr != s.data() + s.size()) {
                throw Error(ErrorCode::ParseError, "line " + std::to_string(row.line) + ": '" + s + "' is not a number");
            }
            out.pi(static_cast<Eigen::Index>(r), j) = v;
            max_value = std::max(max_value, v);
        }
    }
    if (max_value > 1.0) {
        out.pi /= 100.0;
        out.rescaled_from_percent = true;
        out.warnings.push_back("values above 1 found; table read as percentages and divided by 100");
    }
    return out;
}

FrequencyTable frequency_table(const StackedTable& t) {
    FrequencyTable ft;
    ft.groups = t.groups;
    for (std::size_t i = 0; i < t.classes.size(); ++i) {
        FrequencyRow row;
        row.label = t.classes[i].label;
        const auto ii = static_cast<Eigen::Index>(i);
        for (Eigen::Index j = 0; j < t.pi.cols(); ++j) row.percent.push_back(100.0 * t.pi(ii, j));
        row.average_percent = 100.0 * t.avg_frequency(ii);
        ft.rows.push_back(std::move(row));
    }
    return ft;
}

namespace {

std::string pct(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

}  // namespace

std::string format_frequency_table(const FrequencyTable& ft) {
    std::size_t label_width = 8;
    for (const auto& row : ft.rows) label_width = std::max(label_width, row.label.size());
    std::vector<std::size_t> widths;
    for (const auto& g : ft.groups) widths.push_back(std::max<std::size_t>(g.size(), 7));

    std::ostringstream os;
    auto pad = [&](const std::string& s, std::size_t w, bool left) {
        const std::string fill(w > s.size() ? w - s.size() : 0, ' ');
        os << (left ? s + fill : fill + s);
    };
    pad("AE class", label_width, true);
    for (std::size_t j = 0; j < ft.groups.size(); ++j) {
        os << "  ";
        pad(ft.groups[j], widths[j], false);
    }
    os << "  " << " Average\n";
    for (const auto& row : ft.rows) {
        pad(row.label, label_width, true);
        for (std::size_t j = 0; j < row.percent.size(); ++j) {
            os << "  ";
            pad(pct(row.percent[j]), widths[j], false);
        }
        os << "  ";
        pad(pct(row.average_percent), 8, false);
        os << '\n';
    }
    return os.str();
}

std::string frequency_table_csv(const FrequencyTable& ft) {
    std::ostringstream os;
    os << "class";
    for (const auto& g : ft.groups) os << ',' << quote_field(g, ',');
    os << ",average\n";
    for (const auto& row : ft.rows) {
        os << quote_field(row.label, ',');
        for (double v : row.percent) os << ',' << pct(v);
        os << ',' << pct(row.average_percent) << '\n';
    }
    return os.str();
}

}  // namespace aeca
