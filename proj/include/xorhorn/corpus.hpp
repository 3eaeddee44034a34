#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace xorhorn {

struct CorpusEntry {
    std::string name;
    std::string summary;
    std::string text;  // theory source, parsed with parse_theory
};

const std::vector<CorpusEntry>& corpus();
std::optional<CorpusEntry> corpus_entry(std::string_view name);

}  // namespace xorhorn
