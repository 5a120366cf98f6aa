#include "graderalign/prompt_forge.hpp"

#include <algorithm>
#include <sstream>

#include "graderalign/errors.hpp"

namespace graderalign {

namespace {

const char* kSystemPrompt =
    "The agent is an impartial science educator working in a middle school. His job is working "
    "under the supervision of the User.";

const char* kRubricInstruction =
    "Your job is to provide the analytic rubric for a science item. The analytic rubric includes "
    "a minimum set of rules, each of which covers a specific required action, and their complete "
    "collection describes the requirements of the entire task.";

const char* kAgentAck = "I will begin to work on my job.";

std::string quoted_label_list(const std::vector<GradeLabel>& labels) {
    std::string out;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (i > 0) out += (i + 1 == labels.size()) ? " and " : ", ";
        out += "\"" + labels[i].name + "\"";
    }
    return out;
}

std::string grading_instruction(const AssessmentItem& item, const RubricVariant& variant) {
    const bool analytic =
        variant.kind == RubricKind::HumanAnalytic || variant.kind == RubricKind::GeneratedAnalytic;
    std::string out =
        analytic ? "Your job is to evaluate the quality of student responses strictly following "
                   "the Analytic Rubric provided previously. "
                 : "Your job is to evaluate the quality of the response provided by a student to "
                   "a science item. ";
    out += "Begin your evaluation by providing a short explanation. Be as objective as possible. "
           "After providing your explanation, you must classify the response on a scale of " +
           quoted_label_list(item.labels) +
           " by strictly following this format: [[rating]], for example: \"Rating: [[" +
           item.labels.front().name + "]]\". ";
    out += variant.kind == RubricKind::None ? "Refer to the CONTEXT while rating."
                                            : "Refer to the CONTEXT and RUBRIC while rating.";
    return out;
}

// Task / Total Points / optional holistic / optional graded responses block
// shared by the example rounds and the final request round of Template-1.
std::string item_presentation(const AssessmentItem& item, const GenerationSetting& setting,
                              const std::vector<StudentResponse>& graded) {
    std::string out;
    out += render_markdown_block("Task", item.task_description);
    out += render_markdown_block("Total Points", std::to_string(item.level_count()));
    if (setting.include_holistic) {
        out += "- __Holistic Rubric:__\n";
        out += holistic_text(item) + "\n";
    }
    if (setting.include_graded_responses) {
        for (const auto& r : graded)
            out += render_markdown_block("Graded Response (" + r.gold_label.name + ")", r.text);
    }
    while (!out.empty() && out.back() == '\n') out.pop_back();
    return out;
}

std::string grading_context(const AssessmentItem& item, const RubricVariant& variant,
                            const std::string& response_text) {
    std::string out = render_markdown_block("Context", item.task_description);
    if (variant.kind != RubricKind::None) {
        if (variant.rules_or_text.find('\n') != std::string::npos)
            out += "- __Rubric:__\n" + variant.rules_or_text + "\n";
        else
            out += render_markdown_block("Rubric", variant.rules_or_text);
    }
    out += render_markdown_block("Student Response", response_text);
    while (!out.empty() && out.back() == '\n') out.pop_back();
    return out;
}

}  // namespace

std::string role_name(Role role) {
    switch (role) {
        case Role::System: return "System";
        case Role::User: return "User";
        case Role::Agent: return "Agent";
    }
    return "?";
}

void ChatTranscript::validate() const {
    if (messages.empty()) throw ValidationError("transcript: empty");
    if (messages.front().role != Role::System)
        throw ValidationError("transcript: first message must be System");
    for (std::size_t i = 0; i < messages.size(); ++i) {
        if (messages[i].content.empty())
            throw ValidationError("transcript: empty message at position " + std::to_string(i));
        if (i > 0 && messages[i].role == Role::System)
            throw ValidationError("transcript: System allowed only at position 0");
    }
    for (std::size_t i = 1; i < messages.size(); ++i) {
        const Role expect = (i % 2 == 1) ? Role::User : Role::Agent;
        if (messages[i].role != expect)
            throw ValidationError("transcript: roles must alternate User/Agent");
    }
    if (messages.back().role != Role::User)
        throw ValidationError("transcript: final message must be a User request");
}

std::string render_markdown_block(const std::string& label, const std::string& body) {
    if (label.empty()) throw std::invalid_argument("render_markdown_block: empty label");
    return "- __" + label + ":__ " + body + "\n";
}

std::string holistic_text(const AssessmentItem& item) {
    // Highest level first, matching the conventional rubric presentation.
    std::string out;
    for (auto it = item.labels.rbegin(); it != item.labels.rend(); ++it) {
        auto desc = std::find_if(item.holistic_rubric.begin(), item.holistic_rubric.end(),
                                 [&](const auto& p) { return p.first == it->name; });
        if (desc == item.holistic_rubric.end()) continue;
        if (!out.empty()) out += "\n";
        out += "- " + it->name + " Level: " + desc->second;
    }
    return out;
}

std::string join_rules(const std::vector<std::string>& rules) {
    std::string out;
    for (std::size_t i = 0; i < rules.size(); ++i) {
        if (i > 0) out += " ||| ";
        out += rules[i];
    }
    return out;
}

ChatTranscript render_rubric_prompt(
    const AssessmentItem& item, const GenerationSetting& setting,
    const std::vector<AssessmentItem>& example_items,
    const std::optional<std::vector<StudentResponse>>& target_graded) {
    if (setting.in_context == InContext::Oneshot && example_items.size() != 1)
        throw ConfigError("oneshot requires exactly one example item (got " +
                          std::to_string(example_items.size()) + ")");
    if (setting.in_context == InContext::None && !example_items.empty())
        throw ConfigError("zero-shot setting must not carry example items");
    for (const auto& ex : example_items)
        if (ex.id == item.id)
            throw ConfigError("example items must exclude the target item '" + item.id + "'");
    if (setting.max_graded < 1) throw ConfigError("max_graded must be >= 1");

    ChatTranscript t;
    t.messages.push_back({Role::System, kSystemPrompt});
    t.messages.push_back({Role::User, kRubricInstruction});
    t.messages.push_back({Role::Agent, kAgentAck});

    for (const auto& ex : example_items) {
        std::vector<StudentResponse> graded;
        if (setting.include_graded_responses)
            graded = select_graded_examples(ex, setting.max_graded, setting.seed);
        t.messages.push_back({Role::User, item_presentation(ex, setting, graded)});
        std::string reply = render_markdown_block("Analytic Rubric", join_rules(ex.analytic_rubric));
        reply.pop_back();  // message content carries no trailing newline
        t.messages.push_back({Role::Agent, std::move(reply)});
    }

    std::vector<StudentResponse> graded;
    if (setting.include_graded_responses) {
        graded = target_graded ? *target_graded
                               : select_graded_examples(item, setting.max_graded, setting.seed);
    }
    t.messages.push_back({Role::User, item_presentation(item, setting, graded)});
    t.validate();
    return t;
}

ChatTranscript render_grading_prompt(
    const AssessmentItem& item, const RubricVariant& variant, const StudentResponse& response,
    const std::optional<std::pair<StudentResponse, GradeLabel>>& example) {
    if (variant.kind != RubricKind::None && variant.rules_or_text.empty())
        throw ConfigError("rubric variant '" + std::to_string(int(variant.kind)) +
                          "' has empty rubric text");

    ChatTranscript t;
    t.messages.push_back({Role::System, kSystemPrompt});
    t.messages.push_back({Role::User, grading_instruction(item, variant)});
    t.messages.push_back({Role::Agent, kAgentAck});

    if (example) {
        t.messages.push_back({Role::User, grading_context(item, variant, example->first.text)});
        t.messages.push_back({Role::Agent, "Rating: [[" + example->second.name + "]]"});
    }

    t.messages.push_back({Role::User, grading_context(item, variant, response.text)});
    t.validate();
    return t;
}

std::string to_text(const ChatTranscript& transcript) {
    std::string out;
    for (std::size_t i = 0; i < transcript.messages.size(); ++i) {
        if (i > 0) out += "\n";
        out += role_name(transcript.messages[i].role) + ":\n";
        out += transcript.messages[i].content + "\n";
    }
    return out;
}

}  // namespace graderalign
