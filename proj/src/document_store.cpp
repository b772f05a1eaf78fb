#include "verifai/document_store.hpp"

#include "verifai/error.hpp"
#include "verifai/json_io.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>

namespace verifai {

DocumentStore::DocumentStore(std::vector<Document> docs) : docs_(std::move(docs)) {
    std::sort(docs_.begin(), docs_.end(),
              [](const Document& a, const Document& b) { return doc_id_less(a.doc_id, b.doc_id); });
    for (std::size_t i = 1; i < docs_.size(); ++i) {
        if (docs_[i - 1].doc_id == docs_[i].doc_id) {
            throw_invalid("duplicate doc_id " + docs_[i].doc_id);
        }
    }
}

const Document* DocumentStore::find(std::string_view doc_id) const {
    auto it = std::lower_bound(docs_.begin(), docs_.end(), doc_id,
                               [](const Document& d, std::string_view id) { return doc_id_less(d.doc_id, id); });
    if (it == docs_.end() || it->doc_id != doc_id) {
        return nullptr;
    }
    return &*it;
}

void DocumentStore::save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error(ErrorKind::invalid_input, "cannot write " + path.string());
    }
    for (const auto& d : docs_) {
        out << document_to_json(d).dump() << '\n';
    }
}

DocumentStore DocumentStore::load(const std::filesystem::path& path) {
    IngestOptions options;
    options.filter_empty = false;
    return DocumentStore(ingest(path, options).documents);
}

} // namespace verifai
