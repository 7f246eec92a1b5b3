#include "gabm/errors.hpp"
#include "gabm/llm.hpp"

#include <json.hpp>

#include <fstream>

namespace gabm {

using nlohmann::json;

ReplayCache::ReplayCache(std::filesystem::path path) : path_(std::move(path)) {
    std::ifstream in(path_);
    if (!in) return;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto rec = json::parse(line, nullptr, false);
        if (rec.is_discarded() || !rec.contains("key") || !rec.contains("reply")) {
            throw IoError(path_.string() + ":" + std::to_string(line_no) + ": malformed cache record");
        }
        replies_.try_emplace(rec["key"].get<std::string>(), rec["reply"].get<std::string>());
    }
}

std::optional<std::string> ReplayCache::lookup(const std::string& key) const {
    std::shared_lock lock(mutex_);
    auto it = replies_.find(key);
    if (it == replies_.end()) return std::nullopt;
    return it->second;
}

std::string ReplayCache::insert(const CacheRecord& record) {
    std::unique_lock lock(mutex_);
    auto [it, inserted] = replies_.try_emplace(record.key, record.reply);
    if (!inserted) return it->second;

    json j = {{"key", record.key},       {"model_id", record.model_id}, {"temperature", record.temperature},
              {"prompt", record.prompt}, {"reply", record.reply},       {"timestamp", record.timestamp}};
    if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
    std::ofstream out(path_, std::ios::app | std::ios::binary);
    if (!out) throw IoError("cannot append to cache file " + path_.string());
    out << j.dump() << '\n';
    out.flush();
    return it->second;
}

std::size_t ReplayCache::size() const {
    std::shared_lock lock(mutex_);
    return replies_.size();
}

} // namespace gabm
