#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include <json.hpp>

#include "aeca/ae_data.hpp"

namespace aeca {

struct DatasetHandle {
    std::string id;
    std::string name;
    std::string created_at;  // UTC, ISO 8601
    std::uint64_t sequence = 0;
    std::string content_sha256;
    ColumnMap columns;
    std::vector<std::string> groups;
    std::vector<std::size_t> patients_per_group;
    std::size_t record_count = 0;
    std::size_t patient_count = 0;
    std::size_t rejected_count = 0;
};

nlohmann::json to_json(const DatasetHandle& h);
DatasetHandle dataset_handle_from_json(const nlohmann::json& j);

std::string sha256_hex(std::string_view bytes);

// On-disk store: <dir>/blobs/<sha256>.txt holds uploaded bytes (shared by
// identical uploads), <dir>/datasets/<id>.json the handle. Every upload gets a
// fresh id. Reads take a shared lock, uploads an exclusive one.
class DatasetStore {
public:
    explicit DatasetStore(std::filesystem::path dir);

    struct Added {
        DatasetHandle handle;
        std::vector<RejectedRow> rejected;
    };

    /// Parses, persists and indexes. Throws aeca::Error from parsing.
    Added add(const std::string& bytes, const ColumnMap& columns, const std::string& name);

    std::vector<DatasetHandle> list() const;
    std::optional<DatasetHandle> find(const std::string& id) const;
    /// Parsed dataset for a handle (cached after the first load).
    std::shared_ptr<const ParseResult> load(const std::string& id) const;

    const std::filesystem::path& directory() const noexcept { return dir_; }

private:
    std::filesystem::path dir_;
    mutable std::shared_mutex mutex_;
    std::map<std::string, DatasetHandle> handles_;
    mutable std::mutex cache_mutex_;
    mutable std::map<std::string, std::shared_ptr<const ParseResult>> cache_;
    std::uint64_t next_sequence_ = 1;
};

}  // namespace aeca
