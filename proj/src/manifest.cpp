// SPDX-License-Identifier: Apache-2.0

#include "triage/manifest.hpp"

#include <openssl/evp.h>

#include <cstdlib>
#include <ctime>

#include <nlohmann/json.hpp>

#include "triage/error.hpp"
#include "triage/io_util.hpp"

namespace triage {

std::string sha256_hex(std::string_view data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
        fail("sha256 failed");
    }
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xf];
    }
    return out;
}

void RunManifest::add_input(const std::filesystem::path& path, std::string_view content) {
    inputs[path.string()] = sha256_hex(content);
}

void RunManifest::add_output(const std::filesystem::path& path, std::string_view content) {
    outputs[path.string()] = sha256_hex(content);
}

namespace {

std::string iso8601_utc_now() {
    std::time_t t;
    if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) {
        t = static_cast<std::time_t>(std::strtoll(epoch, nullptr, 10));
    } else {
        t = std::time(nullptr);
    }
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace

RunManifest make_manifest(const std::string& command, std::uint64_t seed,
                          std::string_view config_text) {
    RunManifest m;
    m.command = command;
    m.version = "0.1.0";
    m.seed = seed;
    m.timestamp = iso8601_utc_now();
    m.config_digest = sha256_hex(config_text);
    return m;
}

std::string manifest_json(const RunManifest& manifest) {
    nlohmann::ordered_json j;
    j["command"] = manifest.command;
    j["version"] = manifest.version;
    j["seed"] = manifest.seed;
    j["timestamp"] = manifest.timestamp;
    j["config_digest"] = manifest.config_digest;
    j["inputs"] = nlohmann::ordered_json::object();
    for (const auto& [path, digest] : manifest.inputs) j["inputs"][path] = digest;
    j["outputs"] = nlohmann::ordered_json::object();
    for (const auto& [path, digest] : manifest.outputs) j["outputs"][path] = digest;
    return j.dump(2) + "\n";
}

}  // namespace triage
