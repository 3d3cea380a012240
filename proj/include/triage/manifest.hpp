// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

namespace triage {

std::string sha256_hex(std::string_view data);

/// Provenance record written next to every command's outputs. Content
/// digests make pipelines replayable bit-exactly; the timestamp honours
/// SOURCE_DATE_EPOCH for reproducible runs.
struct RunManifest {
    std::string command;
    std::string version;
    std::uint64_t seed = 0;
    std::string timestamp;
    std::string config_digest;
    std::map<std::string, std::string> inputs;   // path -> sha256
    std::map<std::string, std::string> outputs;  // path -> sha256

    void add_input(const std::filesystem::path& path, std::string_view content);
    void add_output(const std::filesystem::path& path, std::string_view content);
};

RunManifest make_manifest(const std::string& command, std::uint64_t seed,
                          std::string_view config_text);

std::string manifest_json(const RunManifest& manifest);

}  // namespace triage
