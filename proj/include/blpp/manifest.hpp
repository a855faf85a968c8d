#pragma once

#include <string>
#include <vector>

namespace blpp {

inline constexpr const char* kToolVersion = "0.1.0";

// Provenance record emitted by every CLI run: the exact configuration, the
// produced files with their digests, and per-sweep-point status lines.
// Re-running from the embedded config reproduces all digests.
struct RunManifest {
    std::string tool_version = kToolVersion;
    std::string command;
    std::string config_json; // canonical echo of the run's configuration
    std::string started_at;  // ISO-8601, UTC
    std::string finished_at;
    std::vector<std::string> status; // one line per sweep point / stage

    struct Output {
        std::string path;
        std::string sha256;
    };
    std::vector<Output> outputs;

    void add_output(const std::string& path); // computes the digest
    std::string to_json() const;
    void write(const std::string& path) const;
};

std::string iso8601_utc_now();

} // namespace blpp
