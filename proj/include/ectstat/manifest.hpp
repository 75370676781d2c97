#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace ectstat {

inline constexpr const char* kToolVersion = "0.1.0";

/// Reproducibility record written next to (or embedded in) every output.
struct RunManifest {
    struct FileDigest {
        std::string path;
        std::string sha256;
    };

    std::string command;
    nlohmann::ordered_json config = nlohmann::ordered_json::object();
    std::vector<FileDigest> inputs;
    std::vector<FileDigest> outputs;
    std::string started_utc;
    std::string finished_utc;

    nlohmann::ordered_json to_json() const;
};

/// Current UTC time as ISO-8601 with seconds precision.
std::string utc_timestamp();

} // namespace ectstat
