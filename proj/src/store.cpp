#include "aeca/store.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <random>
#include <sstream>

#include <openssl/evp.h>

#include "aeca/error.hpp"

namespace aeca {

namespace fs = std::filesystem;
using nlohmann::json;

std::string sha256_hex(std::string_view bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
        throw Error(ErrorCode::IoError, "sha256 failed");
    }
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xF];
    }
    return out;
}

json to_json(const DatasetHandle& h) {
    return json{
        {"id", h.id},
        {"name", h.name},
        {"created_at", h.created_at},
        {"sequence", h.sequence},
        {"content_sha256", h.content_sha256},
        {"columns",
         {{"patient", h.columns.patient},
          {"group", h.columns.group},
          {"grade", h.columns.grade},
          {"domain", h.columns.domain},
          {"term", h.columns.term},
          {"cycle", h.columns.cycle}}},
        {"groups", h.groups},
        {"patients_per_group", h.patients_per_group},
        {"record_count", h.record_count},
        {"patient_count", h.patient_count},
        {"rejected_count", h.rejected_count},
    };
}

DatasetHandle dataset_handle_from_json(const json& j) {
    DatasetHandle h;
    h.id = j.at("id").get<std::string>();
    h.name = j.at("name").get<std::string>();
    h.created_at = j.at("created_at").get<std::string>();
    h.sequence = j.at("sequence").get<std::uint64_t>();
    h.content_sha256 = j.at("content_sha256").get<std::string>();
    const auto& c = j.at("columns");
    h.columns = ColumnMap{c.at("patient").get<std::string>(), c.at("group").get<std::string>(),
                          c.at("grade").get<std::string>(),   c.at("domain").get<std::string>(),
                          c.at("term").get<std::string>(),    c.at("cycle").get<std::string>()};
    h.groups = j.at("groups").get<std::vector<std::string>>();
    h.patients_per_group = j.at("patients_per_group").get<std::vector<std::size_t>>();
    h.record_count = j.at("record_count").get<std::size_t>();
    h.patient_count = j.at("patient_count").get<std::size_t>();
    h.rejected_count = j.at("rejected_count").get<std::size_t>();
    return h;
}

namespace {

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot read " + p.string());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_atomic(const fs::path& p, std::string_view bytes) {
    fs::path tmp = p;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorCode::IoError, "cannot write " + tmp.string());
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!out) throw Error(ErrorCode::IoError, "short write to " + tmp.string());
    }
    fs::rename(tmp, p);
}

std::string utc_now() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string random_id() {
    static thread_local std::mt19937_64 rng{std::random_device{}()};
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(rng()));
    return buf;
}

}  // namespace

DatasetStore::DatasetStore(fs::path dir) : dir_(std::move(dir)) {
    fs::create_directories(dir_ / "blobs");
    fs::create_directories(dir_ / "datasets");
    for (const auto& entry : fs::directory_iterator(dir_ / "datasets")) {
        if (entry.path().extension() != ".json") continue;
        DatasetHandle h = dataset_handle_from_json(json::parse(read_file(entry.path())));
        next_sequence_ = std::max(next_sequence_, h.sequence + 1);
        handles_.emplace(h.id, std::move(h));
    }
}

DatasetStore::Added DatasetStore::add(const std::string& bytes, const ColumnMap& columns, const std::string& name) {
    auto parsed = std::make_shared<ParseResult>(parse_dataset(bytes, columns));
    const Dataset& d = parsed->dataset;

    DatasetHandle h;
    h.name = name;
    h.created_at = utc_now();
    h.content_sha256 = sha256_hex(bytes);
    h.columns = columns;
    h.groups = d.groups;
    h.patients_per_group = d.patients_per_group;
    h.record_count = d.records.size();
    for (auto n : d.patients_per_group) h.patient_count += n;
    h.rejected_count = parsed->rejected.size();

    const fs::path blob = dir_ / "blobs" / (h.content_sha256 + ".txt");
    {
        std::unique_lock lock(mutex_);
        do {
            h.id = random_id();
        } while (handles_.count(h.id));
        h.sequence = next_sequence_++;
        if (!fs::exists(blob)) write_atomic(blob, bytes);
        write_atomic(dir_ / "datasets" / (h.id + ".json"), to_json(h).dump(2));
        handles_.emplace(h.id, h);
    }
    {
        std::lock_guard lock(cache_mutex_);
        cache_[h.id] = parsed;
    }
    return Added{h, parsed->rejected};
}

std::vector<DatasetHandle> DatasetStore::list() const {
    std::shared_lock lock(mutex_);
    std::vector<DatasetHandle> out;
    for (const auto& [id, h] : handles_) out.push_back(h);
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.sequence < b.sequence; });
    return out;
}

std::optional<DatasetHandle> DatasetStore::find(const std::string& id) const {
    std::shared_lock lock(mutex_);
    auto it = handles_.find(id);
    if (it == handles_.end()) return std::nullopt;
    return it->second;
}

std::shared_ptr<const ParseResult> DatasetStore::load(const std::string& id) const {
    {
        std::lock_guard lock(cache_mutex_);
        auto it = cache_.find(id);
        if (it != cache_.end()) return it->second;
    }
    auto handle = find(id);
    if (!handle) return nullptr;
    const std::string bytes = read_file(dir_ / "blobs" / (handle->content_sha256 + ".txt"));
    auto parsed = std::make_shared<const ParseResult>(parse_dataset(bytes, handle->columns));
    std::lock_guard lock(cache_mutex_);
    return cache_.emplace(id, parsed).first->second;
}

}  // namespace aeca
