#include "ectstat/manifest.hpp"

#include <chrono>
#include <ctime>

namespace ectstat {

nlohmann::ordered_json RunManifest::to_json() const {
    auto files = [](const std::vector<FileDigest>& list) {
        auto arr = nlohmann::ordered_json::array();
        for (const auto& f : list) arr.push_back({{"path", f.path}, {"sha256", f.sha256}});
        return arr;
    };
    nlohmann::ordered_json j;
    j["tool"] = "ectstat";
    j["version"] = kToolVersion;
    j["command"] = command;
    j["config"] = config;
    j["inputs"] = files(inputs);
    j["outputs"] = files(outputs);
    j["started_utc"] = started_utc;
    j["finished_utc"] = finished_utc;
    return j;
}

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

} // namespace ectstat
