#include "kgfake/prompts.hpp"

#include "kgfake/error.hpp"
#include "kgfake/hash.hpp"
#include "kgfake_templates.hpp"  // generated from templates/

namespace kgfake {

namespace templates {
std::string_view generation_system() { return generated::kGenerationSystem; }
std::string_view generation_user() { return generated::kGenerationUser; }
std::string_view detection_system() { return generated::kDetectionSystem; }
std::string_view detection_user() { return generated::kDetectionUser; }
}  // namespace templates

std::string prompt_fingerprint(std::string_view system_part, std::string_view user_part) {
    return Fnv1a{}.field(system_part).field(user_part).hex();
}

std::string render_template(std::string_view text, const std::map<std::string, std::string, std::less<>>& values) {
    std::string out;
    out.reserve(text.size());
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t open = text.find("{{", pos);
        if (open == std::string_view::npos) {
            out.append(text.substr(pos));
            break;
        }
        std::size_t close = text.find("}}", open + 2);
        if (close == std::string_view::npos) {
            out.append(text.substr(pos));
            break;
        }
        out.append(text.substr(pos, open - pos));
        std::string_view name = text.substr(open + 2, close - open - 2);
        auto it = values.find(name);
        if (it == values.end()) throw TemplateError(std::string(name));
        out.append(it->second);
        pos = close + 2;
    }
    return out;
}

namespace {

PromptText make_prompt(std::string system_part, std::string user_part) {
    PromptText p;
    p.fingerprint = prompt_fingerprint(system_part, user_part);
    p.system_part = std::move(system_part);
    p.user_part = std::move(user_part);
    return p;
}

}  // namespace

PromptText build_generation_prompt(std::string_view subject, std::string_view description,
                                   std::string_view relation, std::string_view object_used) {
    if (subject.empty()) throw TemplateError("subject");
    if (relation.empty()) throw TemplateError("relation");
    if (object_used.empty()) throw TemplateError("object");
    std::map<std::string, std::string, std::less<>> values{
        {"subject", std::string(subject)},
        {"description", std::string(description.empty() ? kNoDescription : description)},
        {"relation", std::string(relation)},
        {"object", std::string(object_used)},
    };
    return make_prompt(std::string(templates::generation_system()),
                       render_template(templates::generation_user(), values));
}

PromptText build_detection_prompt(std::string_view statement) {
    if (statement.empty()) throw TemplateError("statement");
    return make_prompt(std::string(templates::detection_system()),
                       render_template(templates::detection_user(), {{"statement", std::string(statement)}}));
}

}  // namespace kgfake
