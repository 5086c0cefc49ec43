#include <doctest.h>

#include <fstream>
#include <random>
#include <sstream>

#include "aeca/biplot.hpp"
#include "aeca/error.hpp"
#include "aeca/json_io.hpp"
#include "oracles.hpp"
#include "schema_check.hpp"

using namespace aeca;

namespace {

Eigen::MatrixXd to_eigen(const oracle::Matrix& m) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(m.size()), static_cast<Eigen::Index>(m.front().size()));
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = 0; j < m[i].size(); ++j) out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = m[i][j];
    return out;
}

struct Fixture {
    StackedTable table;
    CAResult result;
};

Fixture r04() {
    Fixture f;
    f.table = from_pi_matrix(to_eigen(oracle::scaled(oracle::kR04Percent, 0.01)), oracle::kR04Classes, oracle::kR04Groups);
    f.result = decompose(f.table);
    return f;
}

Fixture random_fixture(std::mt19937_64& rng, int I, int J) {
    Fixture f;
    std::vector<std::string> classes, groups;
    for (int i = 0; i < I; ++i) classes.push_back("C" + std::to_string(i + 1));
    for (int j = 0; j < J; ++j) groups.push_back("T" + std::to_string(j + 1));
    f.table = from_pi_matrix(to_eigen(oracle::random_pi(rng, I, J)), classes, groups);
    f.result = decompose(f.table);
    return f;
}

std::vector<std::string> shown(const BiplotView& v) {
    std::vector<std::string> out;
    for (const auto& c : v.class_points) out.push_back(c.label);
    return out;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

}  // namespace

TEST_CASE("axis labels") {
    CHECK(axis_label(1, 87.8512) == "Dim 1 (87.85%)");
    CHECK(axis_label(3, 1.0) == "Dim 3 (1.00%)");
}

TEST_CASE("R04 grade view: loss of information and shares") {
    const auto f = r04();
    const auto v = make_view(f.result, f.table, BiplotConfig{});
    CHECK(v.dims == std::pair<int, int>{1, 2});
    CHECK(v.loss_of_information == doctest::Approx(1.77).epsilon(0.5 / 1.77));
    CHECK(std::abs(v.loss_of_information + v.shares.first + v.shares.second - 100.0) < 0.01);
    CHECK(v.axis_labels.first.rfind("Dim 1 (", 0) == 0);
    CHECK_FALSE(v.one_dimensional);
    CHECK(shown(v) == oracle::kR04Classes);
    CHECK(v.group_points.size() == 4);

    const auto v13 = make_view(f.result, f.table, BiplotConfig{{1, 3}});
    CHECK(v13.loss_of_information == doctest::Approx(f.result.inertia_shares(1)));
}

TEST_CASE("complements are shown only on request") {
    const auto f = r04();
    BiplotConfig cfg;
    cfg.show_complements = true;
    const auto v = make_view(f.result, f.table, cfg);
    REQUIRE(v.class_points.size() == 10);
    CHECK(v.class_points[1].complement);
    CHECK(v.class_points[1].label == "G1\xE1\xB6\x9C");
    CHECK(v.class_points[1].avg_frequency == doctest::Approx(1.0 - v.class_points[0].avg_frequency));
    CHECK(v.class_points[1].frequencies[0] == doctest::Approx(1.0 - 0.0122));
}

TEST_CASE("config validation") {
    const auto f = r04();
    auto code = [&](BiplotConfig cfg) {
        try {
            make_view(f.result, f.table, cfg);
        } catch (const Error& e) {
            return e.code();
        }
        return ErrorCode::IoError;
    };
    BiplotConfig cfg;
    cfg.contrib_min = 1.5;
    CHECK(code(cfg) == ErrorCode::InvalidConfig);
    cfg = {};
    cfg.freq_min = -0.1;
    CHECK(code(cfg) == ErrorCode::InvalidConfig);
    cfg = {};
    cfg.dims = {1, 1};
    CHECK(code(cfg) == ErrorCode::InvalidConfig);
    cfg.dims = {0, 2};
    CHECK(code(cfg) == ErrorCode::InvalidConfig);
    cfg.dims = {2, 4};
    CHECK(code(cfg) == ErrorCode::InvalidConfig);
    cfg.dims = {3, 2};
    CHECK(code(cfg) == ErrorCode::IoError);
}

TEST_CASE("rank below 2 falls back to a strip") {
    const auto table = from_pi_matrix(to_eigen({{0.1, 0.3}, {0.5, 0.2}}), {"a", "b"}, {"X", "Y"});
    const auto res = decompose(table);
    REQUIRE(res.rank == 1);
    const auto v = make_view(res, table, BiplotConfig{});
    CHECK(v.one_dimensional);
    CHECK(v.dims == std::pair<int, int>{1, 0});
    CHECK(v.loss_of_information == doctest::Approx(0.0));
    CHECK(v.axis_labels.second == "(none)");
    // two equal-mass groups sit opposite each other on dim 1
    CHECK(v.group_points[0].x == doctest::Approx(-v.group_points[1].x));
    CHECK(v.group_points[0].y == 0.0);
    // tie on magnitude: the first group gets the positive side
    CHECK(v.group_points[0].x > 0.0);

    const auto flat = from_pi_matrix(to_eigen({{0.4, 0.4}}), {"a"}, {"X", "Y"});
    const auto v0 = make_view(decompose(flat), flat, BiplotConfig{});
    CHECK(v0.one_dimensional);
    CHECK(v0.loss_of_information == 0.0);
    CHECK(v0.group_points[0].x == 0.0);
}

TEST_CASE("high-frequency class with low contribution is filtered, rare high-contribution class kept") {
    const oracle::Matrix pi = {{0.10, 0.45, 0.12, 0.50}, {0.30, 0.32, 0.60, 0.62}, {0.0, 0.0, 0.02, 0.06},
                               {0.20, 0.19, 0.21, 0.20}};
    const auto table = from_pi_matrix(to_eigen(pi), {"Nausea", "Fatigue", "Rare", "Pain"}, {"A", "B", "C", "D"});
    const auto res = decompose(table);
    BiplotConfig cfg;
    cfg.contrib_min = 0.01;
    cfg.freq_min = 0.01;
    const auto v = make_view(res, table, cfg);
    CHECK(table.avg_frequency(3) == doctest::Approx(0.20));
    CHECK(std::max(res.contributions(6, 0), res.contributions(6, 1)) < 0.01);
    CHECK(table.avg_frequency(2) == doctest::Approx(0.02));
    CHECK(std::max(res.contributions(4, 0), res.contributions(4, 1)) > 0.05);
    CHECK(v.dropped_by_filter == std::vector<std::string>{"Pain"});
    CHECK(shown(v) == std::vector<std::string>{"Nausea", "Fatigue", "Rare"});
}

TEST_CASE("property: filters are monotone and equal to manual filtering") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(0.0, 0.4);
    for (int trial = 0; trial < 60; ++trial) {
        const auto f = random_fixture(rng, 3 + static_cast<int>(rng() % 6), 3 + static_cast<int>(rng() % 3));
        BiplotConfig zero;
        zero.show_complements = trial % 2 == 1;
        const auto all = make_view(f.result, f.table, zero);
        CHECK(all.class_points.size() == f.table.class_count() * (zero.show_complements ? 2 : 1));
        CHECK(all.dropped_by_filter.empty());

        BiplotConfig lo = zero;
        lo.contrib_min = u(rng);
        lo.freq_min = u(rng);
        BiplotConfig hi = lo;
        hi.contrib_min += u(rng) / 4;
        hi.freq_min += u(rng) / 4;
        const auto vlo = make_view(f.result, f.table, lo);
        const auto vhi = make_view(f.result, f.table, hi);
        const auto slo = shown(vlo);
        for (const auto& label : shown(vhi)) CHECK(std::find(slo.begin(), slo.end(), label) != slo.end());

        std::vector<std::string> manual;
        for (const auto& c : all.class_points) {
            if (std::max(c.contribution_a, c.contribution_b) >= lo.contrib_min && c.avg_frequency >= lo.freq_min)
                manual.push_back(c.label);
        }
        CHECK(manual == slo);
        for (std::size_t n = 0, m = 0; n < all.class_points.size() && m < vlo.class_points.size(); ++n) {
            if (all.class_points[n].label != vlo.class_points[m].label) continue;
            CHECK(all.class_points[n].x == vlo.class_points[m].x);
            CHECK(all.class_points[n].y == vlo.class_points[m].y);
            ++m;
        }
        CHECK(vlo.loss_of_information == all.loss_of_information);
        CHECK(std::abs(vlo.loss_of_information + vlo.shares.first + vlo.shares.second - 100.0) < 0.01);
    }
}

TEST_CASE("SVG output") {
    const auto f = r04();
    const auto v = make_view(f.result, f.table, BiplotConfig{});
    const std::string svg = render_svg(v);
    CHECK(svg == render_svg(v));
    CHECK(svg.find("<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"720\" height=\"560\"") !=
          std::string::npos);
    CHECK(svg.find("<g id=\"groups\"") != std::string::npos);
    CHECK(svg.find("<g id=\"classes\"") != std::string::npos);
    CHECK(svg.find("<g id=\"origin\"") != std::string::npos);
    CHECK(svg.find(v.axis_labels.first) != std::string::npos);
    CHECK(svg.find("Loss of information: 1.78%") != std::string::npos);
    CHECK(svg.find("5-FU + Oxa") != std::string::npos);

    BiplotConfig strict;
    strict.contrib_min = 1.0;
    const auto empty = make_view(f.result, f.table, strict);
    CHECK(empty.class_points.empty());
    const std::string svg_empty = render_svg(empty, 400, 300);
    CHECK(svg_empty.find("<circle") == std::string::npos);
    CHECK(svg_empty.find("<polygon") != std::string::npos);
    CHECK(svg_empty.find("width=\"400\"") != std::string::npos);
}

TEST_CASE("SVG escapes labels") {
    const auto table = from_pi_matrix(to_eigen({{0.1, 0.3, 0.2}, {0.5, 0.2, 0.4}}), {"A&B", "<x>"}, {"T\"1", "T2", "T3"});
    const auto v = make_view(decompose(table), table, BiplotConfig{});
    const std::string svg = render_svg(v);
    CHECK(svg.find("A&amp;B") != std::string::npos);
    CHECK(svg.find("&lt;x&gt;") != std::string::npos);
    CHECK(svg.find("T&quot;1") != std::string::npos);
    CHECK(svg.find("A&B") == std::string::npos);
}

TEST_CASE("JSON round trip and schema") {
    const auto f = r04();
    BiplotConfig cfg;
    cfg.contrib_min = 0.05;
    cfg.show_complements = true;
    const auto v = make_view(f.result, f.table, cfg);
    const std::string text = export_json(v);
    const auto back = view_from_json(text);
    CHECK(export_json(back) == text);
    REQUIRE(back.class_points.size() == v.class_points.size());
    for (std::size_t n = 0; n < v.class_points.size(); ++n) {
        CHECK(back.class_points[n].x == v.class_points[n].x);
        CHECK(back.class_points[n].contribution_b == v.class_points[n].contribution_b);
        CHECK(back.class_points[n].frequencies == v.class_points[n].frequencies);
    }
    CHECK(back.loss_of_information == v.loss_of_information);
    CHECK(back.dropped_by_filter == v.dropped_by_filter);

    const auto j = nlohmann::json::parse(text);
    CHECK(schema::validate("biplot_view.schema.json", j).empty());
    CHECK(j["class_points"].size() == v.class_points.size());
    CHECK(j["frequency_table"]["rows"].size() == v.class_points.size());

    nlohmann::json broken = j;
    broken.erase("dims");
    broken["extra"] = 1;
    CHECK(schema::validate("biplot_view.schema.json", broken).size() == 2);
    CHECK_THROWS_AS(view_from_json("{\"dims\": [1]}"), Error);
    CHECK_THROWS_AS(view_from_json("not json"), Error);
}

TEST_CASE("golden view file") {
    const std::string golden = slurp(std::string(AECA_TEST_DATA) + "/r04_grade_view.golden.json");
    REQUIRE_FALSE(golden.empty());
    const auto j = nlohmann::json::parse(golden);
    CHECK(schema::validate("biplot_view.schema.json", j).empty());

    const auto f = r04();
    const auto now = to_json(make_view(f.result, f.table, BiplotConfig{}));
    CHECK(now["class_points"].size() == j["class_points"].size());
    for (std::size_t n = 0; n < now["class_points"].size(); ++n) {
        CHECK(now["class_points"][n]["label"] == j["class_points"][n]["label"]);
        CHECK(std::abs(now["class_points"][n]["x"].get<double>() - j["class_points"][n]["x"].get<double>()) < 1e-12);
        CHECK(std::abs(now["class_points"][n]["y"].get<double>() - j["class_points"][n]["y"].get<double>()) < 1e-12);
    }
    for (std::size_t n = 0; n < now["group_points"].size(); ++n) {
        CHECK(std::abs(now["group_points"][n]["x"].get<double>() - j["group_points"][n]["x"].get<double>()) < 1e-12);
    }
    CHECK(now["axis_labels"] == j["axis_labels"]);
}
