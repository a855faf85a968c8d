#include "blpp/manifest.hpp"

#include <ctime>
#include <fstream>

#include "json.hpp"

#include "blpp/errors.hpp"
#include "blpp/sha256.hpp"

namespace blpp {

std::string iso8601_utc_now() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void RunManifest::add_output(const std::string& path) {
    outputs.push_back({path, Sha256::of_file(path)});
}

std::string RunManifest::to_json() const {
    nlohmann::json j;
    j["format"] = "blpp-manifest v1";
    j["tool_version"] = tool_version;
    j["command"] = command;
    j["config"] = config_json.empty() ? nlohmann::json(nullptr)
                                      : nlohmann::json::parse(config_json);
    j["started_at"] = started_at;
    j["finished_at"] = finished_at;
    j["status"] = status;
    auto& outs = j["outputs"] = nlohmann::json::array();
    for (const auto& o : outputs) outs.push_back({{"path", o.path}, {"sha256", o.sha256}});
    return j.dump(2);
}

void RunManifest::write(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw ParameterError("cannot write manifest: " + path);
    out << to_json() << '\n';
}

} // namespace blpp
