#pragma once

#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "aeca/ae_data.hpp"
#include "aeca/biplot.hpp"
#include "aeca/ca_core.hpp"
#include "aeca/contingency.hpp"

namespace aeca {

struct AnalysisRequest {
    ClassLevel level = ClassLevel::Grade;
    std::optional<int> cycle;
    std::optional<int> min_grade;
    BiplotConfig biplot;
};

struct AnalysisOutput {
    StackedTable table;
    CAResult result;
    BiplotView view;
    FrequencyTable frequencies;
};

/// Cycle filter -> grade filter -> stacked table -> CA -> view.
AnalysisOutput run_analysis(const Dataset& d, const AnalysisRequest& req);
AnalysisOutput run_analysis(StackedTable table, const BiplotConfig& cfg);

/// Full response document: inertia table for every dimension, dropped classes,
/// the CA result, the filtered view and the frequency table.
nlohmann::json analysis_json(const AnalysisOutput& out);

/// Text version of the inertia decomposition printed by the CLI.
std::string format_inertia_table(const CAResult& result, std::string_view level_name);

/// "4.76%" -> 0.0476, "0.05" -> 0.05. Throws InvalidConfig.
double parse_threshold(std::string_view text);

/// "1,2" -> {1, 2}. Throws InvalidConfig.
std::pair<int, int> parse_dims(std::string_view text);

}  // namespace aeca
