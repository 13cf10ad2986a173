#include "salc/jsonl.hpp"

#include <fstream>
#include <sstream>

namespace salc::jsonl {

std::vector<Record> read_records(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::IoError, "cannot open " + path.string());
    }
    std::vector<Record> records;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        nlohmann::json value = nlohmann::json::parse(line, nullptr, false);
        if (value.is_discarded()) {
            throw Error(ErrorCode::SchemaError,
                        path.string() + ":" + std::to_string(line_no) + ": invalid JSON");
        }
        records.push_back({line_no, std::move(value)});
    }
    return records;
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    const auto temp = path.string() + ".tmp";
    {
        std::ofstream out(temp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw Error(ErrorCode::IoError, "cannot write " + temp);
        }
        out << content;
        if (!out.flush()) {
            throw Error(ErrorCode::IoError, "short write to " + temp);
        }
    }
    std::filesystem::rename(temp, path);
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::IoError, "cannot open " + path.string());
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

}  // namespace salc::jsonl
