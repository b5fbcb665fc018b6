#pragma once
// Generation and detection prompt rendering.
//
// Template text lives in templates/*.txt and is compiled in; `{{name}}` slots
// are filled in a single pass, so slot values are never re-expanded.

#include <functional>
#include <map>
#include <string>
#include <string_view>

namespace kgfake {

inline constexpr std::string_view kNoDescription = "(no description available)";

struct PromptText {
    std::string system_part;
    std::string user_part;
    std::string fingerprint;

    // Form sent to providers without a system role.
    std::string single_message() const { return system_part + "\n\n" + user_part; }
};

// Fingerprint over both parts; what mock response maps are keyed by.
std::string prompt_fingerprint(std::string_view system_part, std::string_view user_part);

// Throws TemplateError naming the first slot without a value.
std::string render_template(std::string_view text, const std::map<std::string, std::string, std::less<>>& values);

// An empty description renders as kNoDescription. Throws TemplateError naming
// the first empty required field (subject, relation, object).
PromptText build_generation_prompt(std::string_view subject, std::string_view description,
                                   std::string_view relation, std::string_view object_used);

// Throws TemplateError("statement") when the statement is empty.
PromptText build_detection_prompt(std::string_view statement);

namespace templates {
std::string_view generation_system();
std::string_view generation_user();
std::string_view detection_system();
std::string_view detection_user();
}  // namespace templates

}  // namespace kgfake
