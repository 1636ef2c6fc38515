#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace neurowise {

/// Text with `{name}` placeholders. Only `{identifier}` is treated as a placeholder, so
/// JSON snippets like `{"categories": []}` pass through literally.
class PromptTemplate {
public:
    PromptTemplate() = default;

    /// Throws SchemaError if the text references a placeholder outside `allowed`.
    PromptTemplate(std::string text, const std::set<std::string>& allowed);

    static PromptTemplate load(const std::filesystem::path& path, const std::set<std::string>& allowed);

    /// Throws ContractViolation if a referenced placeholder is unbound.
    std::string render(const std::map<std::string, std::string>& bindings) const;

    const std::set<std::string>& placeholders() const { return placeholders_; }
    const std::string& text() const { return text_; }

private:
    struct Piece {
        bool is_placeholder;
        std::string value;
    };

    std::string text_;
    std::vector<Piece> pieces_;
    std::set<std::string> placeholders_;
};

std::string read_text_file(const std::filesystem::path& path);

}  // namespace neurowise
