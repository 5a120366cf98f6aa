#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "graderalign/item_model.hpp"

namespace graderalign {

enum class Role { System, User, Agent };

std::string role_name(Role role);

struct ChatMessage {
    Role role;
    std::string content;
};

// Ordered role-play conversation. Exactly one system message at position 0;
// user/agent alternate after it and the final message is a user request
// awaiting completion.
struct ChatTranscript {
    std::vector<ChatMessage> messages;

    void validate() const;  // throws ValidationError on structural violations
};

enum class InContext { None, Oneshot, Fullshot };

// One experimental condition for rubric generation.
struct GenerationSetting {
    InContext in_context = InContext::None;
    bool include_holistic = false;
    bool include_graded_responses = false;
    int max_graded = 5;
    std::uint64_t seed = 0;
};

enum class RubricKind { None, HumanAnalytic, GeneratedAnalytic, Holistic };

// Content for the grading prompt's rubric slot. kind == None omits the slot.
struct RubricVariant {
    RubricKind kind = RubricKind::None;
    std::string rules_or_text;
};

// `- __<label>:__ <body>` with a trailing newline; body passed verbatim.
std::string render_markdown_block(const std::string& label, const std::string& body);

// Per-level holistic descriptors as bullet lines, highest level first.
std::string holistic_text(const AssessmentItem& item);

// Analytic rules joined with the " ||| " separator for use in prompts.
std::string join_rules(const std::vector<std::string>& rules);

// Three-round rubric-generation template. One user/agent pair per example
// item; the final user turn presents the target item. When
// include_graded_responses is set, `target_graded` carries the preselected
// responses for the target item (callers exclude the evaluation sample).
ChatTranscript render_rubric_prompt(
    const AssessmentItem& item, const GenerationSetting& setting,
    const std::vector<AssessmentItem>& example_items,
    const std::optional<std::vector<StudentResponse>>& target_graded = std::nullopt);

// Three-round grading template with an optional graded example turn.
ChatTranscript render_grading_prompt(
    const AssessmentItem& item, const RubricVariant& variant, const StudentResponse& response,
    const std::optional<std::pair<StudentResponse, GradeLabel>>& example = std::nullopt);

// Canonical plain-text rendering (golden-file format): each message is a
// role line followed by its content, one blank line between messages,
// trailing newline at end.
std::string to_text(const ChatTranscript& transcript);

}  // namespace graderalign
