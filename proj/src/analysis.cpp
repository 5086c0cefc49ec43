#include "aeca/analysis.hpp"

#include <charconv>
#include <cstdio>
#include <sstream>

#include "aeca/delimited.hpp"
#include "aeca/error.hpp"
#include "aeca/json_io.hpp"

namespace aeca {

AnalysisOutput run_analysis(StackedTable table, const BiplotConfig& cfg) {
    AnalysisOutput out;
    out.table = std::move(table);
    out.result = decompose(out.table);
    out.view = make_view(out.result, out.table, cfg);
    out.frequencies = frequency_table(out.table);
    return out;
}

AnalysisOutput run_analysis(const Dataset& d, const AnalysisRequest& req) {
    const Dataset* current = &d;
    Dataset by_cycle;
    Dataset by_grade;
    if (req.cycle) {
        by_cycle = filter_cycle(*current, *req.cycle);
        current = &by_cycle;
    }
    if (req.min_grade && *req.min_grade > 1) {
        by_grade = filter_min_grade(*current, *req.min_grade);
        current = &by_grade;
    }
    return run_analysis(build_stacked(*current, req.level), req.biplot);
}

nlohmann::json analysis_json(const AnalysisOutput& out) {
    return nlohmann::json{
        {"n_classes", out.table.class_count()},
        {"n_groups", out.table.group_count()},
        {"groups", out.table.groups},
        {"total_inertia", out.result.total_inertia},
        {"rank", out.result.rank},
        {"inertia_table", inertia_table_json(out.result)},
        {"dropped_classes", out.result.dropped_classes},
        {"result", to_json(out.result)},
        {"view", to_json(out.view)},
        {"frequency_table", to_json(out.frequencies)},
    };
}

std::string format_inertia_table(const CAResult& r, std::string_view level_name) {
    std::ostringstream os;
    char buf[160];
    os << "Inertia decomposition (" << level_name << ", " << r.row_labels.size() / 2 << " AE classes, total inertia ";
    std::snprintf(buf, sizeof buf, "%.6g", r.total_inertia);
    os << buf << ")\n";
    os << "Dim  Singular value      Inertia  Share(%)  Cumulative(%)\n";
    double cumulative = 0.0;
    for (Eigen::Index k = 0; k < r.rank; ++k) {
        cumulative += r.inertia_shares(k);
        std::snprintf(buf, sizeof buf, "%3d  %14.8f  %11.8f  %8.2f  %13.2f\n", static_cast<int>(k + 1),
                      r.singular_values(k), r.singular_values(k) * r.singular_values(k), r.inertia_shares(k), cumulative);
        os << buf;
    }
    return os.str();
}

double parse_threshold(std::string_view text) {
    std::string s = trim(text);
    bool percent = false;
    if (!s.empty() && s.back() == '%') {
        percent = true;
        s.pop_back();
        s = trim(s);
    }
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
        throw Error(ErrorCode::InvalidConfig, "threshold '" + std::string(text) + "' is not a number");
    }
    if (percent) v /= 100.0;
    if (v < 0.0 || v > 1.0) {
        throw Error(ErrorCode::InvalidConfig, "threshold '" + std::string(text) + "' outside [0,1] (use '%' for percentages)");
    }
    return v;
}

std::pair<int, int> parse_dims(std::string_view text) {
    const std::string s = trim(text);
    const auto comma = s.find(',');
    if (comma == std::string::npos) throw Error(ErrorCode::InvalidConfig, "dims must look like '1,2'");
    auto read = [&](std::string part) {
        part = trim(part);
        int v = 0;
        auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
        if (part.empty() || ec != std::errc{} || ptr != part.data() + part.size() || v < 1) {
            throw Error(ErrorCode::InvalidConfig, "dims must be positive integers, got '" + std::string(text) + "'");
        }
        return v;
    };
    return {read(s.substr(0, comma)), read(s.substr(comma + 1))};
}

}  // namespace aeca
