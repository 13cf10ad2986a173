#include "salc/prompts.hpp"

namespace salc::prompts {

using providers::ChatMessage;
using providers::Role;

namespace {

// Template texts are embedded verbatim, trailing whitespace included; the
// copies under assets/templates/ are kept byte-identical by test.

constexpr std::string_view kAbsCriteriaSystem = R"SALC(###Task Description
- You are an impartial judge tasked with evaluating responses provided by an AI assistant to an instruction.
- You are provided with a reference answer for the given instruction.
- Your job is to identify important factors, along with brief descriptions, that a human would use to objectively evaluate the quality of the response based on the given instruction and the reference answer.
- The factors should ensure that responses are aligned with the reference answer and accurately fulfill the requirements of the instruction.
- The factors should be designed to ensure that responses are honest, helpful, and harmless (do not contain offensive content).
- The descriptions of the factors should be framed as chain-of-thought questions that assess whether the response meets the user's instruction and aligned with the reference answer.
- The factors should be objective, considering the instruction and reference answer but not specific details from the response or reference.
- The length of the response should only be considered if it is specified in the instruction.
- Below is the format of Input:
   
    ### Instruction:
    {instruction}
   
    ### Response:
    {response}
   
    ### Reference:
    {reference}
   
- Below is the output format:
 
    1.) **Factor1** - Description of Factor1
    2.) **Factor2** - Description of Factor2
    .
    .
    .
    N.) **FactorN** - Description of FactorN
 
)SALC";

constexpr std::string_view kRelCriteriaSystem = R"SALC(###Task Description
- You are an impartial judge tasked with evaluating responses provided by AI assistants to an instruction.
- Your job is to identify important factors, along with detailed descriptions, that a human would use to objectively evaluate the quality of the responses based on the given instruction.
- The factors should ensure that responses accurately fulfill the requirements of the instruction.
- The factors should be designed to ensure that responses are honest, helpful, and harmless (do not contain offensive content).
- The descriptions of the factors should be framed as chain-of-thought detailed questions that assess whether the responses meets the user's instruction.
- The factors should be objective, considering the instruction but not specific details from the response.
- The length of the response should only be considered as factor if it is specified in the instruction.
- Below is the format of Input:
   
    ### Instruction:
    {instruction}
   
    ### Response A:
    {response_a}
   
    ### Response B:
    {response_b}
   
- Below is the output format:
 
    1.) **Factor1** - Description of Factor1
    2.) **Factor2** - Description of Factor2
    .
    .
    .
    N.) **FactorN** - Description of FactorN
   
    where N is the number of factors defined by you.
)SALC";

constexpr std::string_view kAbsEvalSystem = R"SALC(### Task Description:
- Please act as an impartial judge and evaluate the quality of the response provided by an AI assistant to the user instruction displayed below.
- You are also provided a reference answer that receives a score of 5 for comparison.
- Your evaluation should consider the following factors:
{factors}
- Provide detailed feedback that assesses the quality of the response based on these factors, referencing the provided reference answer.
- After writing the feedback, assign a score that is an integer number between 1 and 5.
- The output format should be: "Feedback: (write feedback for evaluation) [RESULT] (an integer number between 1 and 5)"
- Please do not generate any other opening, closing, and explanations.)SALC";

// Kept verbatim, contradictions included: the verdict clause asks for
// "[[A]]"/"[[B]]" while the output-format clause mentions a decimal score,
// and a reference answer is announced although the user message has no
// reference slot. The parser treats the [[A]]/[[B]] token as authoritative.
constexpr std::string_view kRelEvalSystem = R"SALC(### Task Description:
- Please act as an impartial judge and evaluate the quality of the responses provided by two AI assistants to the user instruction shown below. You should choose the assistant that follows the user's instructions and answers the user's instruction better.
- You are also provided a reference answer.
- Your evaluation should consider the following factors:
{factors}
- Provide detailed feedback that assesses the quality of the response based on these factors, referencing the provided reference answer.
- Don't be influenced by the order in which the responses are presented. Do not favor certain names of the assistants. Be as objective as possible.
- After providing your feedback, output your final verdict by strictly following this format: "[[A]]" if assistant A is better or "[[B]]" if assistant B is better. Note : Do not generate any other variations of the final verdict.
- The output format should be: "Feedback: (write feedback for evaluation) [RESULT] (a decimal number between 1 and 5)"
- The output format should look as follows:
   
   [Feedback]
   
   [Final Verdict]
   
- Please do not generate any other opening, closing, and explanations.)SALC";

// Reference-free derivation of the absolute eval template: the
// reference-announcement bullet is dropped and the feedback bullet loses its
// trailing ", referencing the provided reference answer". Nothing else moves.
constexpr std::string_view kRefFreeEvalSystem = R"SALC(### Task Description:
- Please act as an impartial judge and evaluate the quality of the response provided by an AI assistant to the user instruction displayed below.
- Your evaluation should consider the following factors:
{factors}
- Provide detailed feedback that assesses the quality of the response based on these factors.
- After writing the feedback, assign a score that is an integer number between 1 and 5.
- The output format should be: "Feedback: (write feedback for evaluation) [RESULT] (an integer number between 1 and 5)"
- Please do not generate any other opening, closing, and explanations.)SALC";

// Reference-free derivation of the absolute criteria template, by the same
// rule: every clause that mentions the reference answer is removed or loses
// its reference phrase, and the Reference block leaves the input format.
constexpr std::string_view kRefFreeCriteriaSystem = R"SALC(###Task Description
- You are an impartial judge tasked with evaluating responses provided by an AI assistant to an instruction.
- Your job is to identify important factors, along with brief descriptions, that a human would use to objectively evaluate the quality of the response based on the given instruction.
- The factors should ensure that responses accurately fulfill the requirements of the instruction.
- The factors should be designed to ensure that responses are honest, helpful, and harmless (do not contain offensive content).
- The descriptions of the factors should be framed as chain-of-thought questions that assess whether the response meets the user's instruction.
- The factors should be objective, considering the instruction but not specific details from the response.
- The length of the response should only be considered if it is specified in the instruction.
- Below is the format of Input:
   
    ### Instruction:
    {instruction}
   
    ### Response:
    {response}
   
- Below is the output format:
 
    1.) **Factor1** - Description of Factor1
    2.) **Factor2** - Description of Factor2
    .
    .
    .
    N.) **FactorN** - Description of FactorN
 
)SALC";

void require_nonempty(std::string_view value, const char* field) {
    if (value.empty()) {
        throw Error(ErrorCode::EmptyField, std::string(field) + " must be nonempty");
    }
}

// Fills the single {factors} slot; the literal {instruction}-style markers in
// the criteria templates are format documentation and stay as they are.
std::string fill_factors(std::string_view system, const std::string& factors) {
    const std::string_view slot = "{factors}";
    const auto pos = system.find(slot);
    std::string out(system);
    out.replace(pos, slot.size(), factors);
    return out;
}

RenderedPrompt make_prompt(TemplateId id, std::string system, std::string user,
                           std::map<std::string, std::string> filled) {
    RenderedPrompt prompt;
    prompt.template_id = id;
    prompt.messages = {{Role::System, std::move(system)}, {Role::User, std::move(user)}};
    prompt.placeholders_filled = std::move(filled);
    return prompt;
}

}  // namespace

std::string_view to_string(TemplateId id) {
    switch (id) {
        case TemplateId::AbsCriteria: return "abs_criteria";
        case TemplateId::RelCriteria: return "rel_criteria";
        case TemplateId::AbsEval: return "abs_eval";
        case TemplateId::RelEval: return "rel_eval";
        case TemplateId::RefFreeEval: return "ref_free_eval";
        case TemplateId::RefFreeCriteria: return "ref_free_criteria";
    }
    return "?";
}

std::string_view system_template(TemplateId id) {
    switch (id) {
        case TemplateId::AbsCriteria: return kAbsCriteriaSystem;
        case TemplateId::RelCriteria: return kRelCriteriaSystem;
        case TemplateId::AbsEval: return kAbsEvalSystem;
        case TemplateId::RelEval: return kRelEvalSystem;
        case TemplateId::RefFreeEval: return kRefFreeEvalSystem;
        case TemplateId::RefFreeCriteria: return kRefFreeCriteriaSystem;
    }
    return {};
}

std::string serialize_criteria(const CriteriaSet& set) {
    validate(set);
    std::string out;
    for (std::size_t i = 0; i < set.criteria.size(); ++i) {
        if (i > 0) out += '\n';
        out += std::to_string(i + 1) + ".) **" + set.criteria[i].name + "** - " +
               set.criteria[i].description;
    }
    return out;
}

RenderedPrompt render_absolute_criteria(std::string_view instruction,
                                        std::string_view reference,
                                        std::string_view response) {
    require_nonempty(instruction, "instruction");
    require_nonempty(reference, "reference");
    require_nonempty(response, "response");
    std::string user = "### Instruction:\n" + std::string(instruction) +
                       "\n\n### Response:\n" + std::string(response) +
                       "\n\n### Reference:\n" + std::string(reference);
    return make_prompt(TemplateId::AbsCriteria, std::string(kAbsCriteriaSystem), std::move(user),
                       {{"instruction", std::string(instruction)},
                        {"response", std::string(response)},
                        {"reference", std::string(reference)}});
}

RenderedPrompt render_relative_criteria(std::string_view instruction,
                                        std::string_view response_a,
                                        std::string_view response_b) {
    require_nonempty(instruction, "instruction");
    require_nonempty(response_a, "response_a");
    require_nonempty(response_b, "response_b");
    std::string user = "### Instruction:\n" + std::string(instruction) +
                       "\n\n### Response A:\n" + std::string(response_a) +
                       "\n\n### Response B:\n" + std::string(response_b);
    return make_prompt(TemplateId::RelCriteria, std::string(kRelCriteriaSystem), std::move(user),
                       {{"instruction", std::string(instruction)},
                        {"response_a", std::string(response_a)},
                        {"response_b", std::string(response_b)}});
}

RenderedPrompt render_absolute_eval(std::string_view instruction, const CriteriaSet& criteria,
                                    std::string_view reference, std::string_view response) {
    require_nonempty(instruction, "instruction");
    require_nonempty(reference, "reference");
    require_nonempty(response, "response");
    const std::string factors = serialize_criteria(criteria);
    std::string user = "### Instruction:\n" + std::string(instruction) +
                       "\n\n### Response:\n" + std::string(response) +
                       "\n\n### Reference:\n" + std::string(reference);
    return make_prompt(TemplateId::AbsEval, fill_factors(kAbsEvalSystem, factors),
                       std::move(user),
                       {{"instruction", std::string(instruction)},
                        {"response", std::string(response)},
                        {"reference", std::string(reference)},
                        {"factors", factors}});
}

RenderedPrompt render_relative_eval(std::string_view instruction, const CriteriaSet& criteria,
                                    std::string_view response_a, std::string_view response_b) {
    require_nonempty(instruction, "instruction");
    require_nonempty(response_a, "response_a");
    require_nonempty(response_b, "response_b");
    const std::string factors = serialize_criteria(criteria);
    std::string user = "###User Instruction:\n" + std::string(instruction) +
                       "\n\n###Assistant A:\n" + std::string(response_a) +
                       "\n\n###Assistant B:\n" + std::string(response_b);
    return make_prompt(TemplateId::RelEval, fill_factors(kRelEvalSystem, factors),
                       std::move(user),
                       {{"instruction", std::string(instruction)},
                        {"response_a", std::string(response_a)},
                        {"response_b", std::string(response_b)},
                        {"factors", factors}});
}

RenderedPrompt render_reference_free_eval(std::string_view instruction,
                                          const CriteriaSet& criteria,
                                          std::string_view response) {
    require_nonempty(instruction, "instruction");
    require_nonempty(response, "response");
    const std::string factors = serialize_criteria(criteria);
    std::string user = "### Instruction:\n" + std::string(instruction) +
                       "\n\n### Response:\n" + std::string(response);
    return make_prompt(TemplateId::RefFreeEval, fill_factors(kRefFreeEvalSystem, factors),
                       std::move(user),
                       {{"instruction", std::string(instruction)},
                        {"response", std::string(response)},
                        {"factors", factors}});
}

RenderedPrompt render_reference_free_criteria(std::string_view instruction,
                                              std::string_view response) {
    require_nonempty(instruction, "instruction");
    require_nonempty(response, "response");
    std::string user = "### Instruction:\n" + std::string(instruction) +
                       "\n\n### Response:\n" + std::string(response);
    return make_prompt(TemplateId::RefFreeCriteria, std::string(kRefFreeCriteriaSystem),
                       std::move(user),
                       {{"instruction", std::string(instruction)},
                        {"response", std::string(response)}});
}

}  // namespace salc::prompts
