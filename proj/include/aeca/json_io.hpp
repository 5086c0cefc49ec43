#pragma once

#include <json.hpp>

#include "aeca/biplot.hpp"
#include "aeca/ca_core.hpp"
#include "aeca/contingency.hpp"

namespace aeca {

// Field names are part of the public schema (docs/*.schema.json).
nlohmann::json to_json(const CAResult& result);
nlohmann::json to_json(const FrequencyTable& table);
nlohmann::json to_json(const BiplotView& view);
BiplotView biplot_view_from_json(const nlohmann::json& j);

/// Per-dimension singular value, inertia, share and cumulative share.
nlohmann::json inertia_table_json(const CAResult& result);

}  // namespace aeca
