#pragma once

#include "hybridclf/config.hpp"

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace hybridclf {

inline constexpr int kCheckpointVersion = 1;

struct Checkpoint {
    int format_version = kCheckpointVersion;
    RunConfig config;  ///< paths are not stored
    Vocabulary vocab;
    EmbeddingTable table;
    ModelParams params;
    std::vector<EpochRecord> history;
};

/// Nested JSON arrays following the tensor shape.
nlohmann::json tensor_to_json(const Tensor& t);
/// Inverse of tensor_to_json; throws FormatError on ragged or non-numeric input.
Tensor tensor_from_json(const nlohmann::json& j);

nlohmann::json checkpoint_to_json(const Checkpoint& c);
Checkpoint checkpoint_from_json(const nlohmann::json& j);

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& c);

/// Throws FormatError (with the byte offset when the JSON itself is broken)
/// or VersionError for an unsupported format_version.
Checkpoint load_checkpoint(const std::filesystem::path& path);
Checkpoint parse_checkpoint(std::string_view text);

}  // namespace hybridclf
