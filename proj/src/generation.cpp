#include "verifai/generation.hpp"

#include "verifai/error.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace verifai {

const std::string_view kReferencedQaInstruction =
    "Respond to the Instruction using only the information provided in the relevant abstracts under "
    "Abstracts. Reference the statements with the provided abstract_id in brackets next to the statement "
    "(for example PUBMED:1235):";

const std::string_view kFineTunedQaInstruction =
    "Respond to the Instruction using only the information provided in the relevant abstracts in "
    "“‘Abstracts“‘ below.";

namespace {

bool ieq_prefix(std::string_view text, std::size_t pos, std::string_view lower_word) {
    if (pos + lower_word.size() > text.size()) {
        return false;
    }
    for (std::size_t i = 0; i < lower_word.size(); ++i) {
        if (std::tolower(static_cast<unsigned char>(text[pos + i])) != lower_word[i]) {
            return false;
        }
    }
    return true;
}

bool is_digit(char c) noexcept {
    return c >= '0' && c <= '9';
}

bool is_hspace(char c) noexcept {
    return c == ' ' || c == '\t';
}

std::string strip_terminal_punctuation(std::string_view s) {
    s = trim(s);
    while (!s.empty() && (s.back() == '.' || s.back() == '!' || s.back() == '?')) {
        s.remove_suffix(1);
    }
    return std::string(trim(s));
}

} // namespace

std::vector<std::string> GeneratedAnswer::cited_ids() const {
    std::vector<std::string> out;
    out.reserve(citations.size());
    for (const auto& c : citations) {
        out.push_back(c.doc_id);
    }
    return out;
}

std::vector<CitationSpan> extract_citations(std::string_view text) {
    std::vector<CitationSpan> out;
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (!ieq_prefix(text, i, "pubmed")) {
            continue;
        }
        std::size_t j = i + 6;
        while (j < text.size() && is_hspace(text[j])) {
            ++j;
        }
        if (j >= text.size() || text[j] != ':') {
            continue;
        }
        ++j;
        while (j < text.size() && is_hspace(text[j])) {
            ++j;
        }
        std::size_t d = j;
        while (d < text.size() && is_digit(text[d])) {
            ++d;
        }
        if (d == j) {
            continue;
        }
        out.push_back(CitationSpan{std::string(text.substr(j, d - j)), ByteSpan{i, d}});
        i = d - 1;
    }
    return out;
}

std::vector<std::pair<std::string, std::string>> parse_abstract_blocks(std::string_view instruction) {
    std::vector<std::pair<std::string, std::string>> blocks;
    std::istringstream in{std::string(instruction)};
    std::string line;
    bool in_block = false;
    while (std::getline(in, line)) {
        auto t = trim(line);
        if (t.size() > 7 && ieq_prefix(t, 0, "pubmed:")) {
            auto id = t.substr(7);
            if (std::all_of(id.begin(), id.end(), is_digit)) {
                blocks.emplace_back(std::string(id), std::string());
                in_block = true;
                continue;
            }
        }
        if (t.empty()) {
            in_block = false;
            continue;
        }
        if (in_block) {
            auto& text = blocks.back().second;
            if (!text.empty()) {
                text.push_back('\n');
            }
            text.append(line);
        }
    }
    return blocks;
}

std::string StubGenerationBackend::complete(const ChatRequest& request) const {
    std::string instruction;
    for (const auto& m : request.messages) {
        if (m.role == "user") {
            instruction = m.content;
        }
    }
    auto blocks = parse_abstract_blocks(instruction);
    if (blocks.empty()) {
        return "None of the provided abstracts are relevant to the question.";
    }
    std::string answer;
    for (const auto& [id, text] : blocks) {
        auto sentences = split_sentences(text);
        if (sentences.empty()) {
            continue;
        }
        // Skip the title sentence when the abstract has more to offer.
        const auto& pick = sentences.size() > 1 ? sentences[1] : sentences[0];
        auto body = strip_terminal_punctuation(pick.of(text));
        if (body.empty()) {
            continue;
        }
        if (!answer.empty()) {
            answer.push_back(' ');
        }
        answer.append(body).append(" (PUBMED:").append(id).append(").");
    }
    return answer;
}

FixedGenerationBackend::FixedGenerationBackend(std::string text, std::string name)
    : responder_([t = std::move(text)](const ChatRequest&) { return t; }), name_(std::move(name)) {}

FixedGenerationBackend::FixedGenerationBackend(Responder responder, std::string name)
    : responder_(std::move(responder)), name_(std::move(name)) {}

HttpChatBackend::HttpChatBackend(HttpBackendConfig config, std::string role, bool send_repetition_penalty)
    : config_(std::move(config)), role_(std::move(role)), send_repetition_penalty_(send_repetition_penalty) {
    parse_url(config_.url);
}

nlohmann::json HttpChatBackend::request_body(const ChatRequest& request) const {
    nlohmann::json messages = nlohmann::json::array();
    for (const auto& m : request.messages) {
        messages.push_back({{"role", m.role}, {"content", m.content}});
    }
    nlohmann::json body{
        {"model", config_.model},
        {"messages", std::move(messages)},
        {"max_tokens", request.max_tokens},
        {"temperature", request.temperature},
    };
    if (send_repetition_penalty_ && request.repetition_penalty != 1.0) {
        body["repetition_penalty"] = request.repetition_penalty;
    }
    return body;
}

std::string HttpChatBackend::complete(const ChatRequest& request) const {
    auto response = post_json(role_, config_, request_body(request));
    try {
        const auto& content = response.at("choices").at(0).at("message").at("content");
        return content.is_null() ? std::string() : content.get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw BackendError(role_, std::string("malformed chat response: ") + e.what());
    }
}

PromptBundle build_prompt(std::string_view query, const RankedList& docs, const DocumentStore& store,
                          const PromptOptions& options) {
    if (docs.empty()) {
        throw_invalid("prompt needs at least one document");
    }
    if (docs.size() > options.max_docs) {
        throw_invalid("prompt takes at most " + std::to_string(options.max_docs) + " documents, got " +
                      std::to_string(docs.size()));
    }
    PromptBundle bundle;
    bundle.system_instruction = options.system_instruction;
    std::string instruction(trim(query));
    instruction.append("\n\nAbstracts:\n");
    for (const auto& hit : docs) {
        const auto* doc = store.find(hit.doc_id);
        if (doc == nullptr) {
            throw Error(ErrorKind::not_found, "document " + hit.doc_id + " is not in the store");
        }
        if (std::find(bundle.context_ids.begin(), bundle.context_ids.end(), hit.doc_id) != bundle.context_ids.end()) {
            continue;
        }
        instruction.append("PUBMED:").append(doc->doc_id).append("\n");
        instruction.append(merge_title_abstract(*doc)).append("\n\n");
        bundle.context_ids.push_back(doc->doc_id);
    }
    bundle.instruction = std::move(instruction);
    return bundle;
}

ChatRequest to_chat_request(const PromptBundle& bundle, const GenerationParams& params) {
    ChatRequest req;
    req.messages.push_back({"system", bundle.system_instruction});
    req.messages.push_back({"user", bundle.instruction});
    req.max_tokens = params.max_new_tokens;
    req.temperature = params.temperature;
    req.repetition_penalty = params.repetition_penalty;
    return req;
}

GeneratedAnswer generate(const PromptBundle& bundle, const GenerationParams& params, const GenerationBackend& backend) {
    if (params.max_new_tokens < 1) {
        throw_invalid("max_new_tokens must be >= 1");
    }
    GeneratedAnswer answer;
    answer.text = backend.complete(to_chat_request(bundle, params));
    if (is_blank(answer.text)) {
        throw BackendError("generation", "empty answer from " + backend.name());
    }
    answer.citations = extract_citations(answer.text);
    answer.context_ids = bundle.context_ids;
    answer.backend_name = backend.name();
    return answer;
}

} // namespace verifai
