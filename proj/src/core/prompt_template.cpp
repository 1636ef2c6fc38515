#include "neurowise/core/prompt_template.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "neurowise/core/errors.hpp"

namespace neurowise {

namespace {

bool is_ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_';
}

}  // namespace

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SchemaError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

PromptTemplate::PromptTemplate(std::string text, const std::set<std::string>& allowed)
    : text_(std::move(text)) {
    std::string literal;
    std::size_t i = 0;
    while (i < text_.size()) {
        if (text_[i] == '{') {
            std::size_t j = i + 1;
            while (j < text_.size() && is_ident_char(text_[j])) ++j;
            if (j > i + 1 && j < text_.size() && text_[j] == '}') {
                std::string name = text_.substr(i + 1, j - i - 1);
                if (!allowed.contains(name)) {
                    throw SchemaError("template references unknown placeholder {" + name + "}");
                }
                if (!literal.empty()) pieces_.push_back({false, std::move(literal)});
                literal.clear();
                placeholders_.insert(name);
                pieces_.push_back({true, std::move(name)});
                i = j + 1;
                continue;
            }
        }
        literal.push_back(text_[i]);
        ++i;
    }
    if (!literal.empty()) pieces_.push_back({false, std::move(literal)});
}

PromptTemplate PromptTemplate::load(const std::filesystem::path& path,
                                    const std::set<std::string>& allowed) {
    try {
        return PromptTemplate(read_text_file(path), allowed);
    } catch (const SchemaError& e) {
        throw SchemaError(path.string() + ": " + e.what());
    }
}

std::string PromptTemplate::render(const std::map<std::string, std::string>& bindings) const {
    std::string out;
    for (const auto& piece : pieces_) {
        if (!piece.is_placeholder) {
            out += piece.value;
            continue;
        }
        auto it = bindings.find(piece.value);
        if (it == bindings.end()) {
            throw ContractViolation("placeholder {" + piece.value + "} is not bound");
        }
        out += it->second;
    }
    return out;
}

}  // namespace neurowise
