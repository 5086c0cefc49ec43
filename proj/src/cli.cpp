#include "aeca/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "aeca/analysis.hpp"
#include "aeca/error.hpp"
#include "aeca/service.hpp"

namespace aeca::cli {

namespace {

struct Options {
    std::string input;
    std::string id_col, group_col, grade_col, domain_col, term_col, cycle_col;
    std::string level = "grade";
    std::optional<int> cycle_filter;
    std::optional<int> min_grade;
    std::string contrib_min = "0";
    std::string freq_min = "0";
    std::string dims = "1,2";
    std::string svg_path, json_path, freq_path, roster_path;
    bool pi_matrix = false;
    bool show_complements = false;
    bool print_freq = false;
    int width = 720;
    int height = 560;

    std::string listen;
    std::string data_dir;
    std::size_t max_upload = 0;
    std::string static_dir;
};

class UsageError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

int exit_code_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::MissingColumn:
        case ErrorCode::ParseError:
        case ErrorCode::BadGrade: return kInputFormat;
        case ErrorCode::EmptyDataset: return kEmptyDataset;
        case ErrorCode::SingleGroup: return kSingleGroup;
        case ErrorCode::MissingField: return kMissingField;
        case ErrorCode::OutOfRange:
        case ErrorCode::DimensionMismatch:
        case ErrorCode::DuplicateLabel: return kBadPiMatrix;
        case ErrorCode::DegenerateTable: return kDegenerate;
        case ErrorCode::SvdFailure: return kSvdFailure;
        case ErrorCode::InvalidConfig: return kUsage;
        case ErrorCode::IoError: return kIo;
        case ErrorCode::ZeroWeight: return kInternal;
    }
    return kInternal;
}

std::string quoted(const std::string& s) {
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"' || ch == '\\') out += '\\';
        out += ch == '\n' ? ' ' : ch;
    }
    return out + "\"";
}

int fail(std::ostream& err, std::string_view code, int exit_code, const std::string& message) {
    err << "aeca: error code=" << code << " exit=" << exit_code << " message=" << quoted(message) << '\n';
    return exit_code;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot read '" + path + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_file(const std::string& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot write '" + path + "'");
    out << bytes;
    if (!out) throw Error(ErrorCode::IoError, "short write to '" + path + "'");
}

void add_bindings(CLI::App* cmd, Options& o) {
    cmd->add_option("input", o.input, "Delimited input file (comma or tab)")->required();
    cmd->add_option("--id", o.id_col, "Column holding the patient id");
    cmd->add_option("--group", o.group_col, "Column holding the treatment group");
    cmd->add_option("--grade", o.grade_col, "Column holding the AE grade (1-5)");
    cmd->add_option("--domain", o.domain_col, "Column holding the AE domain");
    cmd->add_option("--term", o.term_col, "Column holding the AE term");
    cmd->add_option("--cycle", o.cycle_col, "Column holding the AE cycle");
    cmd->add_option("--roster", o.roster_path, "Roster file (patient_id, group) defining N per group");
    cmd->add_option("--min-grade", o.min_grade, "Ignore AEs below this grade")->check(CLI::Range(1, 5));
}

ParseResult load_records(const Options& o) {
    if (o.id_col.empty() || o.group_col.empty() || o.grade_col.empty()) {
        throw UsageError("--id, --group and --grade column bindings are required");
    }
    ParseOptions popts;
    if (o.min_grade) popts.min_grade = *o.min_grade;
    if (!o.roster_path.empty()) popts.roster_text = read_file(o.roster_path);
    const ColumnMap columns{o.id_col, o.group_col, o.grade_col, o.domain_col, o.term_col, o.cycle_col};
    return parse_dataset(read_file(o.input), columns, popts);
}

void print_rejects(std::ostream& out, const std::vector<RejectedRow>& rejected) {
    out << "Rejected rows: " << rejected.size() << '\n';
    for (const auto& r : rejected) out << "  line " << r.line << ": " << r.reason << '\n';
}

int analyze(const Options& o, std::ostream& out, std::ostream& err) {
    AnalysisRequest req;
    req.level = parse_level(o.level);
    req.cycle = o.cycle_filter;
    req.biplot.contrib_min = parse_threshold(o.contrib_min);
    req.biplot.freq_min = parse_threshold(o.freq_min);
    req.biplot.dims = parse_dims(o.dims);
    req.biplot.show_complements = o.show_complements;

    AnalysisOutput result;
    if (o.pi_matrix) {
        if (o.cycle_filter) throw UsageError("--cycle-filter needs patient-level records, not a pi matrix");
        const PiMatrixImport imported = read_pi_matrix(read_file(o.input));
        for (const auto& w : imported.warnings) err << "aeca: warning: " << w << '\n';
        result = run_analysis(from_pi_matrix(imported.pi, imported.class_labels, imported.group_labels, req.level),
                              req.biplot);
    } else {
        const ParseResult parsed = load_records(o);
        print_rejects(out, parsed.rejected);
        result = run_analysis(parsed.dataset, req);
    }

    out << format_inertia_table(result.result, to_string(req.level));
    char buf[96];
    std::snprintf(buf, sizeof buf, "Loss of information (dims %d,%d): %.2f%%\n", result.view.dims.first,
                  result.view.dims.second, result.view.loss_of_information);
    out << buf;
    if (result.view.one_dimensional) out << "Rank below 2: biplot drawn as a strip on dimension 1\n";
    out << "Dropped classes (constant 0 or 1 in every group): " << result.result.dropped_classes.size() << '\n';
    for (const auto& label : result.result.dropped_classes) out << "  " << label << '\n';
    out << "Classes shown: " << result.view.class_points.size() << ", filtered out: "
        << result.view.dropped_by_filter.size() << '\n';
    if (o.print_freq) out << '\n' << format_frequency_table(result.frequencies);

    if (!o.svg_path.empty()) {
        write_file(o.svg_path, render_svg(result.view, o.width, o.height));
        // the view JSON goes next to the figure: plot.svg -> plot.view.json
        write_file(std::filesystem::path(o.svg_path).replace_extension(".view.json").string(), export_json(result.view) + "\n");
    }
    if (!o.json_path.empty()) {
        nlohmann::json doc = analysis_json(result);
        doc["level"] = std::string(to_string(req.level));
        doc["cycle"] = req.cycle ? nlohmann::json(*req.cycle) : nlohmann::json(nullptr);
        write_file(o.json_path, doc.dump(2) + "\n");
    }
    if (!o.freq_path.empty()) write_file(o.freq_path, frequency_table_csv(result.frequencies));
    return kOk;
}

int validate(const Options& o, std::ostream& out) {
    const ParseResult parsed = load_records(o);
    const Dataset& d = parsed.dataset;
    out << "Records: " << d.records.size() << '\n' << "Groups: " << d.groups.size() << '\n';
    for (std::size_t j = 0; j < d.groups.size(); ++j) {
        out << "  " << d.groups[j] << ": " << d.patients_per_group[j] << " patients\n";
    }
    print_rejects(out, parsed.rejected);
    if (!o.level.empty() && o.level != "grade") {
        const auto classes = derive_classes(d, parse_level(o.level));
        out << "AE classes at level " << o.level << ": " << classes.classes.size() << '\n';
    }
    return kOk;
}

int serve(const Options& o, std::ostream& out) {
    ServiceConfig cfg = service_config_from_env();
    if (!o.listen.empty()) {
        const auto colon = o.listen.rfind(':');
        if (colon == std::string::npos) throw UsageError("--listen expects host:port");
        cfg.host = o.listen.substr(0, colon);
        try {
            cfg.port = std::stoi(o.listen.substr(colon + 1));
        } catch (const std::exception&) {
            throw UsageError("--listen port is not a number");
        }
    }
    if (!o.data_dir.empty()) cfg.data_dir = o.data_dir;
    if (o.max_upload > 0) cfg.max_upload_bytes = o.max_upload;
    if (!o.static_dir.empty()) cfg.static_dir = o.static_dir;

    Service service(cfg);
    out << "aeca: serving on http://" << cfg.host << ':' << cfg.port << "/v1/ (data dir " << cfg.data_dir.string()
        << ")" << std::endl;
    if (!service.listen()) throw Error(ErrorCode::IoError, "cannot listen on " + cfg.host + ":" + std::to_string(cfg.port));
    return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    Options o;
    CLI::App app{"Correspondence analysis of adverse-event data: stacked tables, inertia decomposition and "
                 "contribution biplots."};
    app.name("aeca");
    app.require_subcommand(1);

    auto* analyze_cmd = app.add_subcommand("analyze", "Run CA on an AE export (or a pi matrix) and write artifacts");
    add_bindings(analyze_cmd, o);
    analyze_cmd->add_option("--level", o.level, "grade | domain | domain_grade | term | term_grade")
        ->capture_default_str();
    analyze_cmd->add_option("--cycle-filter", o.cycle_filter, "Keep only AEs reported at this cycle");
    analyze_cmd->add_option("--contrib-min", o.contrib_min, "Minimum contribution, fraction or percent ('4.76%')")
        ->capture_default_str();
    analyze_cmd->add_option("--freq-min", o.freq_min, "Minimum average relative frequency, fraction or percent")
        ->capture_default_str();
    analyze_cmd->add_option("--dims", o.dims, "Displayed dimensions, e.g. '1,2'")->capture_default_str();
    analyze_cmd->add_option("--svg", o.svg_path, "Write the biplot as SVG (the view JSON is written beside it as <stem>.view.json)");
    analyze_cmd->add_option("--json", o.json_path, "Write the full analysis as JSON");
    analyze_cmd->add_option("--freq-table", o.freq_path, "Write the relative-frequency table as CSV");
    analyze_cmd->add_flag("--pi-matrix", o.pi_matrix, "Input is a class x group table of relative frequencies");
    analyze_cmd->add_flag("--show-complements", o.show_complements, "Also plot complement rows");
    analyze_cmd->add_flag("--print-freq", o.print_freq, "Print the frequency table to stdout");
    analyze_cmd->add_option("--width", o.width, "SVG width in px")->capture_default_str();
    analyze_cmd->add_option("--height", o.height, "SVG height in px")->capture_default_str();

    auto* validate_cmd = app.add_subcommand("validate", "Parse an AE export and report groups and rejected rows");
    add_bindings(validate_cmd, o);
    validate_cmd->add_option("--level", o.level, "Also derive classes at this level");

    auto* serve_cmd = app.add_subcommand("serve", "Start the HTTP JSON API");
    serve_cmd->add_option("--listen", o.listen, "host:port (default 127.0.0.1:8080 or $AECA_LISTEN)");
    serve_cmd->add_option("--data-dir", o.data_dir, "Dataset store directory (default ./aeca-data or $AECA_DATA_DIR)");
    serve_cmd->add_option("--max-upload", o.max_upload, "Upload size limit in bytes ($AECA_MAX_UPLOAD)");
    serve_cmd->add_option("--static-dir", o.static_dir, "Serve built web UI assets from this directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kUsage;
    }

    try {
        if (analyze_cmd->parsed()) return analyze(o, out, err);
        if (validate_cmd->parsed()) return validate(o, out);
        if (serve_cmd->parsed()) return serve(o, out);
    } catch (const UsageError& e) {
        return fail(err, "Usage", kUsage, e.what());
    } catch (const Error& e) {
        return fail(err, to_string(e.code()), exit_code_for(e.code()), e.what());
    } catch (const std::exception& e) {
        return fail(err, "Internal", kInternal, e.what());
    }
    return kUsage;
}

}  // namespace aeca::cli
