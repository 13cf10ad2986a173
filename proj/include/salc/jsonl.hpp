#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "salc/error.hpp"

namespace salc::jsonl {

struct Record {
    std::size_t line = 0;  // 1-based, for error messages
    nlohmann::json value;
};

/// One JSON value per nonempty line; malformed lines throw SchemaError
/// naming the line number.
std::vector<Record> read_records(const std::filesystem::path& path);

/// Write-to-temp then rename, so failures never leave a partial file behind.
void write_atomic(const std::filesystem::path& path, const std::string& content);

std::string read_file(const std::filesystem::path& path);

}  // namespace salc::jsonl
