#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "salc/core.hpp"
#include "salc/providers.hpp"

namespace salc::prompts {

/// AbsCriteria/RelCriteria/AbsEval/RelEval are the published templates,
/// carried verbatim. RefFreeEval and RefFreeCriteria are the reference-free
/// derivations: the same text with every reference clause removed, for
/// instances that have no reference answer.
enum class TemplateId {
    AbsCriteria,
    RelCriteria,
    AbsEval,
    RelEval,
    RefFreeEval,
    RefFreeCriteria,
};

std::string_view to_string(TemplateId id);

struct RenderedPrompt {
    std::vector<providers::ChatMessage> messages;  // system, then user
    TemplateId template_id = TemplateId::AbsCriteria;
    std::map<std::string, std::string> placeholders_filled;
};

/// The numbered `N.) **Name** - Description` block that fills the factors
/// slot of the eval templates. parse_criteria inverts this exactly.
std::string serialize_criteria(const CriteriaSet& set);

RenderedPrompt render_absolute_criteria(std::string_view instruction,
                                        std::string_view reference,
                                        std::string_view response);

RenderedPrompt render_relative_criteria(std::string_view instruction,
                                        std::string_view response_a,
                                        std::string_view response_b);

RenderedPrompt render_absolute_eval(std::string_view instruction, const CriteriaSet& criteria,
                                    std::string_view reference, std::string_view response);

RenderedPrompt render_relative_eval(std::string_view instruction, const CriteriaSet& criteria,
                                    std::string_view response_a, std::string_view response_b);

RenderedPrompt render_reference_free_eval(std::string_view instruction,
                                          const CriteriaSet& criteria,
                                          std::string_view response);

RenderedPrompt render_reference_free_criteria(std::string_view instruction,
                                              std::string_view response);

/// Raw system-template text, before any slot substitution.
std::string_view system_template(TemplateId id);

}  // namespace salc::prompts
