#include "aeca/service.hpp"

#include <cstdlib>

#include <httplib.h>

#include "aeca/delimited.hpp"
#include "aeca/error.hpp"
#include "aeca/json_io.hpp"

namespace aeca {

using nlohmann::json;

ServiceConfig service_config_from_env(ServiceConfig cfg) {
    if (const char* listen = std::getenv("AECA_LISTEN")) {
        const std::string s = listen;
        const auto colon = s.rfind(':');
        if (colon != std::string::npos) {
            cfg.host = s.substr(0, colon);
            cfg.port = std::stoi(s.substr(colon + 1));
        }
    }
    if (const char* dir = std::getenv("AECA_DATA_DIR")) cfg.data_dir = dir;
    if (const char* max = std::getenv("AECA_MAX_UPLOAD")) cfg.max_upload_bytes = std::stoull(max);
    if (const char* dir = std::getenv("AECA_STATIC_DIR")) cfg.static_dir = dir;
    return cfg;
}

AnalysisRequest analysis_request_from_json(const json& body) {
    if (!body.is_object()) throw Error(ErrorCode::InvalidConfig, "analysis request must be a JSON object");
    auto threshold = [&](const char* key) -> double {
        if (!body.contains(key) || body[key].is_null()) return 0.0;
        const auto& v = body[key];
        if (v.is_number()) {
            const double x = v.get<double>();
            if (x < 0.0 || x > 1.0) throw Error(ErrorCode::InvalidConfig, std::string(key) + " outside [0,1]");
            return x;
        }
        if (v.is_string()) return parse_threshold(v.get<std::string>());
        throw Error(ErrorCode::InvalidConfig, std::string(key) + " must be a number or a string");
    };
    try {
        AnalysisRequest req;
        req.level = parse_level(body.value("level", std::string("grade")));
        if (body.contains("cycle") && !body["cycle"].is_null()) req.cycle = body["cycle"].get<int>();
        if (body.contains("min_grade") && !body["min_grade"].is_null()) req.min_grade = body["min_grade"].get<int>();
        req.biplot.contrib_min = threshold("contrib_min");
        req.biplot.freq_min = threshold("freq_min");
        if (body.contains("dims")) {
            const auto& d = body["dims"];
            if (!d.is_array() || d.size() != 2) throw Error(ErrorCode::InvalidConfig, "dims must be a pair");
            req.biplot.dims = {d[0].get<int>(), d[1].get<int>()};
        }
        req.biplot.show_complements = body.value("show_complements", false);
        req.biplot.label_groups = body.value("label_groups", true);
        return req;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::InvalidConfig, std::string("bad analysis request: ") + e.what());
    }
}

namespace {

void send_problem(httplib::Response& res, int status, std::string_view code, const std::string& message,
                  json details = json::object()) {
    res.status = status;
    res.set_content(json{{"code", code}, {"message", message}, {"details", std::move(details)}}.dump(2),
                    "application/json");
}

int analysis_status(ErrorCode code) {
    switch (code) {
        case ErrorCode::SvdFailure:
        case ErrorCode::IoError: return 500;
        default: return 422;
    }
}

void send_json(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(2), "application/json");
}

ColumnMap bindings_from_query(const httplib::Request& req) {
    auto param = [&](const char* key, const char* fallback) {
        return req.has_param(key) ? req.get_param_value(key) : std::string(fallback);
    };
    return ColumnMap{param("id", "patient_id"), param("group", "group"), param("grade", "grade"),
                     param("domain", ""),       param("term", ""),       param("cycle", "")};
}

}  // namespace

Service::Service(ServiceConfig config)
    : config_(std::move(config)), store_(config_.data_dir), server_(std::make_unique<httplib::Server>()) {
    routes();
}

Service::~Service() { stop(); }

void Service::routes() {
    auto& srv = *server_;
    srv.set_payload_max_length(config_.max_upload_bytes);

    srv.set_error_handler([](const httplib::Request&, httplib::Response& res) {
        if (!res.body.empty()) return;
        if (res.status == 413) {
            send_problem(res, 413, "PayloadTooLarge", "upload exceeds the configured size limit");
        } else if (res.status == 404) {
            send_problem(res, 404, "NotFound", "no such resource");
        } else {
            send_problem(res, res.status, "HttpError", "request failed");
        }
    });
    srv.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
        try {
            if (ep) std::rethrow_exception(ep);
        } catch (const std::exception& e) {
            send_problem(res, 500, "InternalError", e.what());
        }
    });
    srv.set_post_routing_handler([](const httplib::Request&, httplib::Response& res) {
        res.set_header("Access-Control-Allow-Origin", "*");
    });

    srv.Post("/v1/datasets", [this](const httplib::Request& req, httplib::Response& res) {
        if (req.body.empty()) {
            send_problem(res, 400, "EmptyBody", "request body must contain delimited AE records");
            return;
        }
        const std::string name = req.has_param("name") ? req.get_param_value("name") : std::string("dataset");
        try {
            auto added = store_.add(req.body, bindings_from_query(req), name);
            json body = to_json(added.handle);
            body["rejected"] = json::array();
            for (const auto& r : added.rejected) body["rejected"].push_back(json{{"line", r.line}, {"reason", r.reason}});
            send_json(res, 201, body);
        } catch (const Error& e) {
            send_problem(res, e.code() == ErrorCode::IoError ? 500 : 400, to_string(e.code()), e.what());
        }
    });

    srv.Get("/v1/datasets", [this](const httplib::Request&, httplib::Response& res) {
        json list = json::array();
        for (const auto& h : store_.list()) list.push_back(to_json(h));
        send_json(res, 200, json{{"datasets", list}});
    });

    srv.Get(R"(/v1/datasets/([0-9a-f]+))", [this](const httplib::Request& req, httplib::Response& res) {
        auto h = store_.find(req.matches[1]);
        if (!h) {
            send_problem(res, 404, "UnknownDataset", "no dataset with id " + std::string(req.matches[1]));
            return;
        }
        send_json(res, 200, to_json(*h));
    });

    srv.Post(R"(/v1/datasets/([0-9a-f]+)/analysis)", [this](const httplib::Request& req, httplib::Response& res) {
        const std::string id = req.matches[1];
        auto parsed = store_.load(id);
        if (!parsed) {
            send_problem(res, 404, "UnknownDataset", "no dataset with id " + id);
            return;
        }
        json body = json::object();
        if (!req.body.empty()) {
            try {
                body = json::parse(req.body);
            } catch (const json::exception& e) {
                send_problem(res, 400, "BadJson", e.what());
                return;
            }
        }
        try {
            const AnalysisRequest request = analysis_request_from_json(body);
            const AnalysisOutput out = run_analysis(parsed->dataset, request);
            if (req.has_param("format") && req.get_param_value("format") == "svg") {
                res.status = 200;
                res.set_content(render_svg(out.view), "image/svg+xml");
                return;
            }
            json doc = analysis_json(out);
            doc["dataset_id"] = id;
            doc["level"] = std::string(to_string(request.level));
            doc["cycle"] = request.cycle ? json(*request.cycle) : json(nullptr);
            send_json(res, 200, doc);
        } catch (const Error& e) {
            send_problem(res, analysis_status(e.code()), to_string(e.code()), e.what());
        }
    });

    srv.Get(R"(/v1/datasets/([0-9a-f]+)/frequency)", [this](const httplib::Request& req, httplib::Response& res) {
        const std::string id = req.matches[1];
        auto parsed = store_.load(id);
        if (!parsed) {
            send_problem(res, 404, "UnknownDataset", "no dataset with id " + id);
            return;
        }
        try {
            const ClassLevel level = parse_level(req.has_param("level") ? req.get_param_value("level") : "grade");
            Dataset filtered;
            const Dataset* d = &parsed->dataset;
            if (req.has_param("cycle") && !req.get_param_value("cycle").empty()) {
                int cycle = 0;
                try {
                    cycle = std::stoi(req.get_param_value("cycle"));
                } catch (const std::exception&) {
                    throw Error(ErrorCode::InvalidConfig, "cycle must be an integer");
                }
                filtered = filter_cycle(*d, cycle);
                d = &filtered;
            }
            const FrequencyTable ft = frequency_table(build_stacked(*d, level));
            if (req.has_param("format") && req.get_param_value("format") == "text") {
                res.status = 200;
                res.set_content(format_frequency_table(ft), "text/plain; charset=utf-8");
                return;
            }
            send_json(res, 200, to_json(ft));
        } catch (const Error& e) {
            send_problem(res, analysis_status(e.code()), to_string(e.code()), e.what());
        }
    });

    if (config_.static_dir) srv.set_mount_point("/", config_.static_dir->string());
}

bool Service::listen() { return server_->listen(config_.host, config_.port); }

int Service::bind_ephemeral() {
    config_.port = server_->bind_to_any_port(config_.host);
    return config_.port;
}

bool Service::serve() { return server_->listen_after_bind(); }

void Service::stop() {
    if (server_) server_->stop();
}

void Service::wait_until_ready() const { server_->wait_until_ready(); }

}  // namespace aeca
