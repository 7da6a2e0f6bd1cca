#pragma once

#include "netr/index.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

namespace netr {

inline constexpr int kIndexFormatVersion = 1;
inline constexpr std::uint32_t kEmbeddingFormatVersion = 1;

/// 64-bit FNV-1a of a file's bytes, as 16 lowercase hex digits.
std::string fileHash(const std::filesystem::path& file);

/// Writes manifest.json, objects.json, tree.json, embeddings.bin,
/// neighbors.json and blocks.json into `dir` (created if needed).
/// `inputHashes` names the source files the index was built from and is
/// recorded verbatim; `queryDefaults` likewise.
void saveIndex(const NetrIndex& index, const std::filesystem::path& dir,
               const std::map<std::string, std::string>& inputHashes = {},
               const nlohmann::json& queryDefaults = nlohmann::json::object());

/// Reads a bundle written by saveIndex, verifying artifact hashes and tree
/// invariants. Throws DataError for missing/corrupt files, InvariantError
/// when the stored tree violates its invariants.
NetrIndex loadIndex(const std::filesystem::path& dir);

nlohmann::json readManifest(const std::filesystem::path& dir);

// Embedding matrix file: "NEMB", u32 version, u32 n, u32 d, then n*d
// little-endian IEEE-754 doubles, row-major in user order.
void writeEmbeddings(const std::filesystem::path& file, const EmbeddingMatrix& vectors);
EmbeddingMatrix readEmbeddings(const std::filesystem::path& file);

} // namespace netr
