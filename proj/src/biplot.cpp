#include "aeca/biplot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "aeca/error.hpp"
#include "aeca/json_io.hpp"

namespace aeca {

std::string axis_label(int dim, double share_percent) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "Dim %d (%.2f%%)", dim, share_percent);
    return buf;
}

BiplotView make_view(const CAResult& result, const StackedTable& table, const BiplotConfig& cfg) {
    auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
    if (!in_unit(cfg.contrib_min) || !in_unit(cfg.freq_min)) {
        throw Error(ErrorCode::InvalidConfig, "thresholds must be fractions in [0,1]");
    }
    if (cfg.dims.first < 1 || cfg.dims.second < 1 || cfg.dims.first == cfg.dims.second) {
        throw Error(ErrorCode::InvalidConfig, "dims must be two distinct 1-based dimensions");
    }

    BiplotView view;
    view.contrib_min = cfg.contrib_min;
    view.freq_min = cfg.freq_min;
    view.label_groups = cfg.label_groups;
    view.groups = result.group_labels;
    view.dropped_classes = result.dropped_classes;

    const int K = result.rank;
    int a = -1;
    int b = -1;
    if (K >= 2) {
        if (cfg.dims.first > K || cfg.dims.second > K) {
            throw Error(ErrorCode::InvalidConfig, "requested dims exceed the rank " + std::to_string(K));
        }
        view.dims = cfg.dims;
        a = cfg.dims.first - 1;
        b = cfg.dims.second - 1;
    } else {
        view.one_dimensional = true;
        view.dims = {1, 0};
        if (K == 1) a = 0;
    }

    view.shares.first = a >= 0 ? result.inertia_shares(a) : 0.0;
    view.shares.second = b >= 0 ? result.inertia_shares(b) : 0.0;
    view.axis_labels.first = axis_label(1 + std::max(a, 0), view.shares.first);
    view.axis_labels.second = b >= 0 ? axis_label(b + 1, view.shares.second) : std::string("(none)");
    // with zero inertia nothing is lost by the projection
    view.loss_of_information = K == 0 ? 0.0 : 100.0 - view.shares.first - view.shares.second;

    auto coord = [](const Eigen::MatrixXd& m, Eigen::Index row, int col) { return col >= 0 ? m(row, col) : 0.0; };

    for (std::size_t j = 0; j < result.group_labels.size(); ++j) {
        const auto jj = static_cast<Eigen::Index>(j);
        view.group_points.push_back(
            GroupPoint{result.group_labels[j], coord(result.treatment_coords, jj, a), coord(result.treatment_coords, jj, b)});
    }

    for (std::size_t i = 0; i < result.class_index.size(); ++i) {
        const auto original = static_cast<Eigen::Index>(result.class_index[i]);
        const double avg = table.avg_frequency(original);
        for (int part = 0; part < 2; ++part) {
            const bool complement = part == 1;
            if (complement && !cfg.show_complements) continue;
            const auto row = static_cast<Eigen::Index>(2 * i + static_cast<std::size_t>(part));
            ClassPoint p;
            p.label = result.row_labels[static_cast<std::size_t>(row)];
            p.complement = complement;
            p.x = coord(result.class_coords, row, a);
            p.y = coord(result.class_coords, row, b);
            p.contribution_a = coord(result.contributions, row, a);
            p.contribution_b = coord(result.contributions, row, b);
            p.avg_frequency = complement ? 1.0 - avg : avg;
            for (Eigen::Index j = 0; j < table.pi.cols(); ++j) {
                const double f = table.pi(original, j);
                p.frequencies.push_back(complement ? 1.0 - f : f);
            }
            const bool keep =
                std::max(p.contribution_a, p.contribution_b) >= cfg.contrib_min && p.avg_frequency >= cfg.freq_min;
            if (keep) {
                view.class_points.push_back(std::move(p));
            } else {
                view.dropped_by_filter.push_back(p.label);
            }
        }
    }
    return view;
}

namespace {

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    std::string s = buf;
    if (s == "-0.00") s = "0.00";
    return s;
}

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char ch : s) {
        switch (ch) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\'': out += "&apos;"; break;
            default: out += ch;
        }
    }
    return out;
}

struct Box {
    double x0, y0, x1, y1;
    bool overlaps(const Box& o) const { return x0 < o.x1 && o.x0 < x1 && y0 < o.y1 && o.y0 < y1; }
};

constexpr double kCharWidth = 6.2;
constexpr double kLabelHeight = 12.0;

// Greedy placement in input order: first candidate offset that clears every
// label already placed, else the first candidate.
std::vector<std::pair<double, double>> place_labels(const std::vector<std::pair<double, double>>& anchors,
                                                    const std::vector<std::string>& labels) {
    std::vector<Box> placed;
    std::vector<std::pair<double, double>> out;
    for (std::size_t n = 0; n < anchors.size(); ++n) {
        const double w = kCharWidth * static_cast<double>(labels[n].size()) + 2.0;
        const auto [ax, ay] = anchors[n];
        std::vector<std::pair<double, double>> candidates;
        for (double scale : {1.0, 2.0, 3.0}) {
            const double d = 6.0 * scale;
            candidates.insert(candidates.end(), {{ax + d, ay - d / 2},
                                                 {ax + d, ay + d + kLabelHeight / 2},
                                                 {ax - d - w, ay - d / 2},
                                                 {ax - d - w, ay + d + kLabelHeight / 2},
                                                 {ax - w / 2, ay - d - 2},
                                                 {ax - w / 2, ay + d + kLabelHeight}});
        }
        auto box_at = [&](const std::pair<double, double>& c) {
            return Box{c.first, c.second - kLabelHeight + 2, c.first + w, c.second + 2};
        };
        std::pair<double, double> chosen = candidates.front();
        for (const auto& c : candidates) {
            const Box bx = box_at(c);
            if (std::none_of(placed.begin(), placed.end(), [&](const Box& p) { return p.overlaps(bx); })) {
                chosen = c;
                break;
            }
        }
        placed.push_back(box_at(chosen));
        out.push_back(chosen);
    }
    return out;
}

}  // namespace

std::string render_svg(const BiplotView& view, int width, int height) {
    const double left = 70, right = 20, top = 40, bottom = 60;
    const double plot_w = std::max(10.0, width - left - right);
    const double plot_h = std::max(10.0, height - top - bottom);

    double xmin = 0, xmax = 0, ymin = 0, ymax = 0;
    auto extend = [&](double x, double y) {
        xmin = std::min(xmin, x);
        xmax = std::max(xmax, x);
        ymin = std::min(ymin, y);
        ymax = std::max(ymax, y);
    };
    for (const auto& g : view.group_points) extend(g.x, g.y);
    for (const auto& c : view.class_points) extend(c.x, c.y);
    double span_x = xmax - xmin;
    double span_y = ymax - ymin;
    if (span_x <= 0) span_x = 1;
    if (span_y <= 0) span_y = span_x;
    xmin -= 0.08 * span_x;
    xmax += 0.08 * span_x;
    ymin -= 0.08 * span_y;
    ymax += 0.08 * span_y;
    span_x = xmax - xmin;
    span_y = ymax - ymin;
    // equal scale on both axes
    const double scale = std::min(plot_w / span_x, plot_h / span_y);
    const double cx = left + plot_w / 2 - scale * (xmin + xmax) / 2;
    const double cy = top + plot_h / 2 + scale * (ymin + ymax) / 2;
    auto px = [&](double x) { return cx + scale * x; };
    auto py = [&](double y) { return cy - scale * y; };

    std::ostringstream os;
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"no\"?>\n"
       << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << width << "\" height=\"" << height
       << "\" viewBox=\"0 0 " << width << ' ' << height << "\" font-family=\"Helvetica, Arial, sans-serif\">\n"
       << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height << "\" fill=\"#ffffff\"/>\n"
       << "<rect x=\"" << num(left) << "\" y=\"" << num(top) << "\" width=\"" << num(plot_w) << "\" height=\""
       << num(plot_h) << "\" fill=\"none\" stroke=\"#999999\"/>\n";

    os << "<g id=\"origin\" stroke=\"#777777\" stroke-dasharray=\"4 3\">\n"
       << "<line x1=\"" << num(left) << "\" y1=\"" << num(py(0)) << "\" x2=\"" << num(left + plot_w) << "\" y2=\""
       << num(py(0)) << "\"/>\n"
       << "<line x1=\"" << num(px(0)) << "\" y1=\"" << num(top) << "\" x2=\"" << num(px(0)) << "\" y2=\""
       << num(top + plot_h) << "\"/>\n"
       << "</g>\n";

    os << "<g id=\"axes\" font-size=\"13\" fill=\"#222222\">\n"
       << "<text x=\"" << num(left + plot_w / 2) << "\" y=\"" << num(top + plot_h + 35)
       << "\" text-anchor=\"middle\">" << xml_escape(view.axis_labels.first) << "</text>\n"
       << "<text x=\"18\" y=\"" << num(top + plot_h / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
       << num(top + plot_h / 2) << ")\">" << xml_escape(view.axis_labels.second) << "</text>\n";
    char loss[64];
    std::snprintf(loss, sizeof loss, "Loss of information: %.2f%%", view.loss_of_information);
    os << "<text x=\"" << num(left) << "\" y=\"24\" font-size=\"12\">" << loss << "</text>\n</g>\n";

    os << "<g id=\"groups\" fill=\"#c0392b\" stroke=\"#7b241c\">\n";
    for (const auto& g : view.group_points) {
        const double x = px(g.x), y = py(g.y);
        os << "<polygon points=\"" << num(x) << ',' << num(y - 6) << ' ' << num(x - 5.5) << ',' << num(y + 4) << ' '
           << num(x + 5.5) << ',' << num(y + 4) << "\"><title>" << xml_escape(g.label) << "</title></polygon>\n";
    }
    os << "</g>\n";

    os << "<g id=\"classes\" fill=\"#2c6fbb\" stroke=\"#1b4472\">\n";
    for (const auto& c : view.class_points) {
        os << "<circle cx=\"" << num(px(c.x)) << "\" cy=\"" << num(py(c.y)) << "\" r=\"4\""
           << (c.complement ? " fill-opacity=\"0.2\"" : "") << "><title>" << xml_escape(c.label) << "</title></circle>\n";
    }
    os << "</g>\n";

    std::vector<std::pair<double, double>> anchors;
    std::vector<std::string> labels;
    std::vector<bool> is_group;
    if (view.label_groups) {
        for (const auto& g : view.group_points) {
            anchors.emplace_back(px(g.x), py(g.y));
            labels.push_back(g.label);
            is_group.push_back(true);
        }
    }
    for (const auto& c : view.class_points) {
        anchors.emplace_back(px(c.x), py(c.y));
        labels.push_back(c.label);
        is_group.push_back(false);
    }
    const auto positions = place_labels(anchors, labels);
    os << "<g id=\"labels\" font-size=\"11\">\n";
    for (std::size_t n = 0; n < labels.size(); ++n) {
        os << "<text x=\"" << num(positions[n].first) << "\" y=\"" << num(positions[n].second) << "\" fill=\""
           << (is_group[n] ? "#7b241c" : "#1b4472") << "\">" << xml_escape(labels[n]) << "</text>\n";
    }
    os << "</g>\n</svg>\n";
    return os.str();
}

std::string export_json(const BiplotView& view) { return to_json(view).dump(2); }

BiplotView view_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ParseError, e.what());
    }
    return biplot_view_from_json(j);
}

}  // namespace aeca
