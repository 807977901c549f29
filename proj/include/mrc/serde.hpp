#pragma once

// Canonical serialization of the core types as line-delimited JSON records:
// one object per line, UTF-8, keys emitted in sorted order so byte output is
// stable across versions and platforms. Field names are part of the on-disk
// contract (caches, traces, manifests) and are documented in the README.

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mrc/types.hpp"

namespace mrc {

using json = nlohmann::json;

json to_json(const NumericAnswer& a);
NumericAnswer answer_from_json(const json& j);

json to_json(const MathProblem& p);
MathProblem problem_from_json(const json& j);

json to_json(const PromptExemplar& e);
PromptExemplar exemplar_from_json(const json& j);

json to_json(const VariationSpec& s);
VariationSpec spec_from_json(const json& j);

json to_json(const SolutionTrace& t);
SolutionTrace trace_from_json(const json& j);

// One compact JSON object per line.
std::string to_jsonl_line(const json& j);

std::vector<json> read_jsonl(const std::filesystem::path& path);
void write_jsonl(const std::filesystem::path& path, const std::vector<json>& records);

// Whole-file helpers used for dataset hashing and byte-compare tests.
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

// Hex SHA-256 of a byte string (dataset hashes, cache keys).
std::string sha256_hex(std::string_view bytes);

}  // namespace mrc
