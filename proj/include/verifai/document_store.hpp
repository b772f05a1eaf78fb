#pragma once

#include "verifai/corpus.hpp"

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace verifai {

/// Immutable id -> Document lookup. Iteration is in doc_id order.
class DocumentStore {
public:
    DocumentStore() = default;
    /// Throws on duplicate ids.
    explicit DocumentStore(std::vector<Document> docs);

    const Document* find(std::string_view doc_id) const;
    std::size_t size() const noexcept { return docs_.size(); }
    bool empty() const noexcept { return docs_.empty(); }
    std::span<const Document> documents() const noexcept { return docs_; }

    /// One JSON record per line, in doc_id order.
    void save(const std::filesystem::path& path) const;
    static DocumentStore load(const std::filesystem::path& path);

private:
    std::vector<Document> docs_;
};

} // namespace verifai
