#include "aeca/json_io.hpp"

#include "aeca/error.hpp"

namespace aeca {

using nlohmann::json;

namespace {

json vec(const Eigen::VectorXd& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

json rows(const Eigen::MatrixXd& m) {
    json out = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) out.push_back(vec(m.row(i).transpose()));
    return out;
}

}  // namespace

json to_json(const CAResult& r) {
    return json{
        {"rank", r.rank},
        {"total_inertia", r.total_inertia},
        {"singular_values", vec(r.singular_values)},
        {"inertia_shares_pct", vec(r.inertia_shares)},
        {"group_labels", r.group_labels},
        {"row_labels", r.row_labels},
        {"group_masses", vec(r.group_masses)},
        {"class_masses", vec(r.class_masses)},
        {"treatment_coords", rows(r.treatment_coords)},
        {"class_coords", rows(r.class_coords)},
        {"contributions", rows(r.contributions)},
        {"dropped_classes", r.dropped_classes},
    };
}

json inertia_table_json(const CAResult& r) {
    json out = json::array();
    double cumulative = 0.0;
    for (Eigen::Index k = 0; k < r.rank; ++k) {
        cumulative += r.inertia_shares(k);
        out.push_back(json{{"dim", k + 1},
                           {"singular_value", r.singular_values(k)},
                           {"inertia", r.singular_values(k) * r.singular_values(k)},
                           {"share_pct", r.inertia_shares(k)},
                           {"cumulative_pct", cumulative}});
    }
    return out;
}

json to_json(const FrequencyTable& t) {
    json out{{"groups", t.groups}, {"rows", json::array()}};
    for (const auto& row : t.rows) {
        out["rows"].push_back(json{{"label", row.label}, {"percent", row.percent}, {"average_percent", row.average_percent}});
    }
    return out;
}

json to_json(const BiplotView& v) {
    json groups = json::array();
    for (const auto& g : v.group_points) groups.push_back(json{{"label", g.label}, {"x", g.x}, {"y", g.y}});
    json classes = json::array();
    json freq_rows = json::array();
    for (const auto& c : v.class_points) {
        classes.push_back(json{{"label", c.label},
                               {"x", c.x},
                               {"y", c.y},
                               {"contribution_a", c.contribution_a},
                               {"contribution_b", c.contribution_b},
                               {"avg_frequency", c.avg_frequency},
                               {"frequencies", c.frequencies},
                               {"complement", c.complement}});
        json pct = json::array();
        for (double f : c.frequencies) pct.push_back(100.0 * f);
        freq_rows.push_back(json{{"label", c.label}, {"percent", pct}, {"average_percent", 100.0 * c.avg_frequency}});
    }
    return json{
        {"dims", {v.dims.first, v.dims.second}},
        {"shares_pct", {v.shares.first, v.shares.second}},
        {"axis_labels", {v.axis_labels.first, v.axis_labels.second}},
        {"loss_of_information_pct", v.loss_of_information},
        {"one_dimensional", v.one_dimensional},
        {"contrib_min", v.contrib_min},
        {"freq_min", v.freq_min},
        {"label_groups", v.label_groups},
        {"groups", v.groups},
        {"group_points", groups},
        {"class_points", classes},
        {"frequency_table", json{{"groups", v.groups}, {"rows", freq_rows}}},
        {"dropped_by_filter", v.dropped_by_filter},
        {"dropped_classes", v.dropped_classes},
    };
}

BiplotView biplot_view_from_json(const json& j) {
    try {
        BiplotView v;
        v.dims = {j.at("dims").at(0).get<int>(), j.at("dims").at(1).get<int>()};
        v.shares = {j.at("shares_pct").at(0).get<double>(), j.at("shares_pct").at(1).get<double>()};
        v.axis_labels = {j.at("axis_labels").at(0).get<std::string>(), j.at("axis_labels").at(1).get<std::string>()};
        v.loss_of_information = j.at("loss_of_information_pct").get<double>();
        v.one_dimensional = j.at("one_dimensional").get<bool>();
        v.contrib_min = j.at("contrib_min").get<double>();
        v.freq_min = j.at("freq_min").get<double>();
        v.label_groups = j.at("label_groups").get<bool>();
        v.groups = j.at("groups").get<std::vector<std::string>>();
        for (const auto& g : j.at("group_points")) {
            v.group_points.push_back(GroupPoint{g.at("label").get<std::string>(), g.at("x").get<double>(), g.at("y").get<double>()});
        }
        for (const auto& c : j.at("class_points")) {
            ClassPoint p;
            p.label = c.at("label").get<std::string>();
            p.x = c.at("x").get<double>();
            p.y = c.at("y").get<double>();
            p.contribution_a = c.at("contribution_a").get<double>();
            p.contribution_b = c.at("contribution_b").get<double>();
            p.avg_frequency = c.at("avg_frequency").get<double>();
            p.complement = c.at("complement").get<bool>();
            p.frequencies = c.at("frequencies").get<std::vector<double>>();
            v.class_points.push_back(std::move(p));
        }
        v.dropped_by_filter = j.at("dropped_by_filter").get<std::vector<std::string>>();
        v.dropped_classes = j.at("dropped_classes").get<std::vector<std::string>>();
        return v;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ParseError, std::string("biplot view JSON: ") + e.what());
    }
}

}  // namespace aeca
