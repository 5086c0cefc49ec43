// Acceptance gate: one PASS/FAIL line per criterion; exit status 1 if any fails.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <thread>

#include "aeca/analysis.hpp"
#include "aeca/service.hpp"
#include "oracles.hpp"

// after Eigen: <resolv.h> defines a _res macro
#include <httplib.h>

using namespace aeca;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(bool ok, const std::string& name, const std::string& detail) {
    std::printf("%s %s: %s\n", ok ? "PASS" : "FAIL", name.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

Eigen::MatrixXd to_eigen(const oracle::Matrix& m) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(m.size()), static_cast<Eigen::Index>(m.front().size()));
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = 0; j < m[i].size(); ++j) out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = m[i][j];
    return out;
}

std::vector<std::string> labels(std::size_t n, const std::string& prefix) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(prefix + std::to_string(i + 1));
    return out;
}

void reproduction(const std::string& name, const oracle::Matrix& percent, const std::vector<std::string>& classes,
                  const std::vector<std::string>& groups, const std::vector<double>& expected) {
    const auto start = std::chrono::steady_clock::now();
    const auto table = from_pi_matrix(to_eigen(oracle::scaled(percent, 0.01)), classes, groups);
    const auto res = decompose(table);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    bool ok = res.rank == static_cast<int>(expected.size()) && seconds < 1.0;
    std::string detail = "shares";
    for (std::size_t k = 0; k < expected.size(); ++k) {
        const double got = static_cast<Eigen::Index>(k) < res.rank ? res.inertia_shares(static_cast<Eigen::Index>(k)) : 0.0;
        ok = ok && std::abs(got - expected[k]) <= 0.5;
        detail += fmt(" %.2f (expected %.2f +/- 0.5, diff %+.2f)", got, expected[k], got - expected[k]);
        detail += k + 1 < expected.size() ? "," : "";
    }
    detail += fmt("; runtime %.3f ms (< 1 s)", 1000 * seconds);
    report(ok, name, detail);
}

void r04_loss() {
    const auto table = from_pi_matrix(to_eigen(oracle::scaled(oracle::kR04Percent, 0.01)), oracle::kR04Classes,
                                      oracle::kR04Groups);
    const auto view = make_view(decompose(table), table, BiplotConfig{});
    report(std::abs(view.loss_of_information - 1.77) <= 0.5, "loss-of-information-r04",
           fmt("loss %.2f%% (expected 1.77 +/- 0.5), dims (%.0f,%.0f)", view.loss_of_information, view.dims.first,
               view.dims.second));
}

void inertia_identities() {
    std::mt19937_64 rng(20240601);
    std::uniform_int_distribution<int> n_classes(1, 10), n_groups(2, 6);
    double worst_inertia = 0, worst_ortho = 0, worst_recon = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const auto pi = oracle::random_pi(rng, n_classes(rng), n_groups(rng));
        const auto t = from_pi_matrix(to_eigen(pi), labels(pi.size(), "C"), labels(pi.front().size(), "T"));
        const auto res = decompose(t);
        const auto S = standardized_residuals(t).S;
        const double loop = oracle::inertia_double_loop(pi);
        for (double v : {oracle::inertia_from_chi2(pi), S.squaredNorm(), res.singular_values.squaredNorm()}) {
            worst_inertia = std::max(worst_inertia, std::abs(v - loop) / loop);
        }
        const Eigen::MatrixXd B = t.col_masses.cwiseSqrt().asDiagonal() * res.treatment_coords *
                                  res.singular_values.cwiseInverse().asDiagonal();
        const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(res.rank, res.rank);
        worst_ortho = std::max(worst_ortho, (res.class_coords.transpose() * res.class_coords - I).cwiseAbs().maxCoeff());
        worst_ortho = std::max(worst_ortho, (B.transpose() * B - I).cwiseAbs().maxCoeff());
        worst_recon = std::max(worst_recon, (reconstruct(res, t.col_masses) - S).cwiseAbs().maxCoeff());
    }
    report(worst_inertia <= 1e-10 && worst_ortho <= 1e-10 && worst_recon <= 1e-10, "inertia-identities",
           fmt("200 tables; max relative inertia disagreement %.2e, max orthonormality error %.2e, max reconstruction "
               "error %.2e (all <= 1e-10)",
               worst_inertia, worst_ortho, worst_recon));
}

void oracle_equivalence() {
    std::mt19937_64 rng(4242);
    int checked = 0, mismatched = 0;
    while (checked < 100) {
        const auto data = oracle::random_records(rng, 20, 4, 5);
        if (data.rows.empty()) continue;
        const auto d = parse_dataset(data.csv, canonical_columns()).dataset;
        const auto t = build_stacked(d, ClassLevel::Grade);
        const auto [class_labels, pi] = oracle::brute_force_grade_pi(data);
        const auto ref = from_pi_matrix(to_eigen(pi), class_labels, data.groups);
        bool same = t.class_count() == ref.class_count() && t.groups == ref.groups && t.pi == ref.pi &&
                    t.profiles == ref.profiles && t.row_masses == ref.row_masses;
        for (std::size_t i = 0; same && i < class_labels.size(); ++i) same = t.classes[i].label == class_labels[i];
        mismatched += same ? 0 : 1;
        ++checked;
    }
    report(mismatched == 0, "oracle-equivalence",
           std::to_string(checked) + " random datasets (<= 20 patients, <= 4 groups, <= 5 classes), " +
               std::to_string(mismatched) + " with any non-identical entry");
}

void filter_semantics() {
    const oracle::Matrix pi = {{0.10, 0.45, 0.12, 0.50}, {0.30, 0.32, 0.60, 0.62}, {0.0, 0.0, 0.02, 0.06},
                               {0.20, 0.19, 0.21, 0.20}};
    const auto table = from_pi_matrix(to_eigen(pi), {"Nausea", "Fatigue", "Rare", "Pain"}, {"A", "B", "C", "D"});
    const auto res = decompose(table);
    BiplotConfig cfg;
    cfg.contrib_min = 0.01;
    const auto view = make_view(res, table, cfg);
    auto shown = [&](const std::string& label) {
        return std::any_of(view.class_points.begin(), view.class_points.end(),
                           [&](const ClassPoint& c) { return c.label == label; });
    };
    const double pain_contrib = std::max(res.contributions(6, 0), res.contributions(6, 1));
    const double rare_contrib = std::max(res.contributions(4, 0), res.contributions(4, 1));
    const bool ok = !shown("Pain") && shown("Rare") && std::abs(table.avg_frequency(3) - 0.20) < 1e-12 &&
                    pain_contrib < 0.01 && table.avg_frequency(2) < 0.05;
    report(ok, "filter-semantics",
           fmt("class with avg frequency 20%% and max dim-1/2 contribution %.3f%% ", 100 * pain_contrib) +
               (shown("Pain") ? "shown" : "excluded") +
               fmt(" at contrib_min 1%%; class with avg frequency 2%% and contribution %.2f%% ", 100 * rare_contrib) +
               (shown("Rare") ? "retained" : "excluded"));
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

bool cli_determinism(const fs::path& work, std::string& detail) {
    const std::string records = oracle::records_from_pi(oracle::scaled(oracle::kR04Percent, 0.01), oracle::kR04Classes,
                                                        oracle::kR04Groups, 10000);
    std::ofstream(work / "r04_records.csv") << records;
    std::vector<std::string> outputs;
    for (int run = 0; run < 2; ++run) {
        const fs::path dir = work / ("run" + std::to_string(run));
        fs::create_directories(dir);
        const std::string cmd = std::string("\"") + AECA_BIN + "\" analyze \"" + (work / "r04_records.csv").string() +
                                "\" --id patient_id --group group --grade grade --contrib-min 4.76% --svg \"" +
                                (dir / "plot.svg").string() + "\" --json \"" + (dir / "analysis.json").string() +
                                "\" --freq-table \"" + (dir / "freq.csv").string() + "\" > \"" +
                                (dir / "stdout.txt").string() + "\" 2>&1";
        if (std::system(cmd.c_str()) != 0) {
            detail = "aeca analyze failed: " + slurp(dir / "stdout.txt");
            return false;
        }
        std::string all;
        for (const char* name : {"plot.svg", "plot.view.json", "analysis.json", "freq.csv", "stdout.txt"}) {
            const std::string bytes = slurp(dir / name);
            if (bytes.empty()) {
                detail = std::string("missing artifact ") + name;
                return false;
            }
            all += bytes + '\0';
        }
        outputs.push_back(all);
    }
    detail = "two CLI runs: SVG, view JSON, analysis JSON, frequency CSV and stdout " +
             std::string(outputs[0] == outputs[1] ? "byte-identical" : "DIFFER");
    return outputs[0] == outputs[1];
}

bool service_replay(const fs::path& work, std::string& detail) {
    const std::string records = oracle::records_from_pi(oracle::scaled(oracle::kR04Percent, 0.01), oracle::kR04Classes,
                                                        oracle::kR04Groups, 10000);
    const std::string request = R"({"level": "grade", "contrib_min": "4.76%", "dims": [1, 2]})";
    auto with_service = [&](const std::function<void(httplib::Client&)>& body) {
        ServiceConfig cfg;
        cfg.data_dir = work / "store";
        Service service(cfg);
        const int port = service.bind_ephemeral();
        std::thread th([&] { service.serve(); });
        service.wait_until_ready();
        httplib::Client client("127.0.0.1", port);
        client.set_read_timeout(30, 0);
        body(client);
        service.stop();
        th.join();
    };
    std::string id, first, second, third;
    with_service([&](httplib::Client& c) {
        auto up = c.Post("/v1/datasets", records, "text/csv");
        if (!up || up->status != 201) return;
        id = nlohmann::json::parse(up->body)["id"];
        auto a = c.Post(("/v1/datasets/" + id + "/analysis").c_str(), request, "application/json");
        auto b = c.Post(("/v1/datasets/" + id + "/analysis").c_str(), request, "application/json");
        if (a && a->status == 200) first = a->body;
        if (b && b->status == 200) second = b->body;
    });
    if (first.empty()) {
        detail = "upload or first analysis failed";
        return false;
    }
    with_service([&](httplib::Client& c) {
        auto r = c.Post(("/v1/datasets/" + id + "/analysis").c_str(), request, "application/json");
        if (r && r->status == 200) third = r->body;
    });
    const bool ok = first == second && first == third;
    detail = std::string("repeated request ") + (first == second ? "identical" : "DIFFERS") + ", replay after restart " +
             (first == third ? "identical" : "DIFFERS") + " (" + std::to_string(first.size()) + " bytes)";
    return ok;
}

void determinism() {
    const fs::path work = fs::temp_directory_path() / ("aeca-acceptance-" + std::to_string(::getpid()));
    fs::remove_all(work);
    fs::create_directories(work);
    std::string cli_detail, service_detail;
    const bool cli_ok = cli_determinism(work, cli_detail);
    const bool service_ok = service_replay(work, service_detail);
    fs::remove_all(work);
    report(cli_ok && service_ok, "determinism", cli_detail + "; service: " + service_detail);
}

// Not a criterion. The printed B35 grade table has a G3 row whose average
// column (7.63) disagrees with the mean of its entries (7.17); replacing the
// adherent-anastrozole cell by the value that restores the average shows
// whether that cell explains a failing B35 line.
void b35_diagnostic() {
    oracle::Matrix corrected = oracle::kB35Percent;
    corrected[1][0] = 4 * 7.63 - (3.91 + 10.61 + 11.94);
    const auto res = decompose(from_pi_matrix(to_eigen(oracle::scaled(corrected, 0.01)), oracle::kB35Classes,
                                              oracle::kB35Groups));
    std::printf("INFO b35-grade-g3-cell: with G3 / Adherent Anastrozole = %.2f (restoring the row average 7.63) "
                "shares are %.2f, %.2f, %.2f\n",
                corrected[1][0], res.inertia_shares(0), res.inertia_shares(1), res.inertia_shares(2));
}

}  // namespace

int main() {
    try {
        reproduction("r04-grade-reproduction", oracle::kR04Percent, oracle::kR04Classes, oracle::kR04Groups,
                     {87.77, 10.46, 1.77});
        reproduction("b35-grade-reproduction", oracle::kB35Percent, oracle::kB35Classes, oracle::kB35Groups,
                     {92.57, 6.98, 0.45});
        b35_diagnostic();
        r04_loss();
        inertia_identities();
        oracle_equivalence();
        filter_semantics();
        determinism();
    } catch (const std::exception& e) {
        report(false, "acceptance-run", std::string("unexpected exception: ") + e.what());
    }
    std::printf("%s: %d criterion(s) failed\n", failures ? "FAIL" : "PASS", failures);
    return failures ? 1 : 0;
}
