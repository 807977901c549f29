#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "mrc/types.hpp"

namespace mrc {

enum class DatasetFormat { Gsm8kJsonl, MgsmTsv };

constexpr std::string_view to_string(DatasetFormat f) {
    switch (f) {
        case DatasetFormat::Gsm8kJsonl: return "gsm8k_jsonl";
        case DatasetFormat::MgsmTsv: return "mgsm_tsv";
    }
    return "??";
}

inline std::optional<DatasetFormat> dataset_format_from_string(std::string_view s) {
    if (s == "gsm8k_jsonl") return DatasetFormat::Gsm8kJsonl;
    if (s == "mgsm_tsv") return DatasetFormat::MgsmTsv;
    return std::nullopt;
}

struct Dataset {
    std::string name;
    std::string split;
    std::vector<MathProblem> problems;
    Lang language = Lang::EN;
};

// The few-shot demonstrations for one language. 4 exemplars everywhere
// except TE, which uses 2 because its 4-shot prompt does not fit the
// default context window.
struct ExemplarBank {
    Lang language = Lang::EN;
    std::vector<PromptExemplar> exemplars;

    int size() const { return static_cast<int>(exemplars.size()); }
};

constexpr int expected_bank_size(Lang l) { return l == Lang::TE ? 2 : 4; }

// Loads a problem set. GSM8K JSONL: one object per line with keys
// `question` and `answer`, the gold value after the final "####" marker.
// MGSM TSV: two tab-separated columns (question, answer), no header.
// Problem ids are "<name>#<row>", so per-language files of the same `name`
// align row-wise. Throws std::runtime_error with a line number on format
// errors and with the problem id on gold-answer parse errors.
Dataset load_dataset(const std::filesystem::path& path, DatasetFormat format, Lang language,
                     std::string name = {}, std::string split = {});

// Loads an exemplar bank: UTF-8 text, blocks separated by blank lines,
// alternating question block then solution block. Enforces the 4-shot
// (TE: 2-shot) size invariant.
ExemplarBank load_exemplar_bank(const std::filesystem::path& path, Lang language);

}  // namespace mrc
