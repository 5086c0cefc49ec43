#pragma once

#include <string>
#include <utility>
#include <vector>

#include "aeca/ca_core.hpp"
#include "aeca/contingency.hpp"

namespace aeca {

struct BiplotConfig {
    std::pair<int, int> dims{1, 2};  // 1-based
    double contrib_min = 0.0;        // fraction
    double freq_min = 0.0;           // fraction, compared with the class average frequency
    bool show_complements = false;
    bool label_groups = true;
};

struct GroupPoint {
    std::string label;
    double x = 0.0;
    double y = 0.0;
};

struct ClassPoint {
    std::string label;
    double x = 0.0;
    double y = 0.0;
    double contribution_a = 0.0;  // share of inertia of the first displayed dim, as a fraction
    double contribution_b = 0.0;
    double avg_frequency = 0.0;
    std::vector<double> frequencies;  // per group; complement rows carry 1 - pi
    bool complement = false;
};

struct BiplotView {
    std::pair<int, int> dims{1, 2};
    std::pair<double, double> shares{0.0, 0.0};  // percent
    std::pair<std::string, std::string> axis_labels;
    double loss_of_information = 0.0;            // percent of inertia outside the two dims
    bool one_dimensional = false;                // rank < 2: strip layout on dim 1
    double contrib_min = 0.0;
    double freq_min = 0.0;
    bool label_groups = true;
    std::vector<std::string> groups;
    std::vector<GroupPoint> group_points;
    std::vector<ClassPoint> class_points;
    std::vector<std::string> dropped_by_filter;
    std::vector<std::string> dropped_classes;  // degenerate, never analyzed
};

/// Throws InvalidConfig for out-of-range thresholds or dims. When the result
/// has rank below 2 the view falls back to a strip on dim 1 and sets one_dimensional.
BiplotView make_view(const CAResult& result, const StackedTable& table, const BiplotConfig& cfg);

/// "Dim 1 (87.85%)"
std::string axis_label(int dim, double share_percent);

/// SVG 1.1; output depends only on the view.
std::string render_svg(const BiplotView& view, int width = 720, int height = 560);

std::string export_json(const BiplotView& view);
BiplotView view_from_json(const std::string& text);

}  // namespace aeca
