#pragma once

#include "dcrl/core/types.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <iosfwd>
#include <vector>

namespace dcrl {

// Conversation log: one JSON object per line.
//   {"user_profile_id": "p17" | null,
//    "ended_reason": "low_score" | "out_of_domain" | "user_stop" | "max_turns",
//    "turns": [{"speaker": "user" | "bot",
//               "focus_after": "lion" | null,
//               "utterances": [{"text": ..., "act": "fact" | null, "act_entity": "lion" | null,
//                               "provider_id": ..., "content_id": ..., "rating": 5 | null}]}]}

nlohmann::json to_json(const DialogueAct& act);
nlohmann::json to_json(const Candidate& candidate);
nlohmann::json to_json(const Conversation& conversation);

Candidate candidate_from_json(const nlohmann::json& j);
Conversation conversation_from_json(const nlohmann::json& j);

void write_conversations(std::ostream& out, const std::vector<Conversation>& conversations);
void write_conversations(const std::filesystem::path& path, const std::vector<Conversation>& conversations);
std::vector<Conversation> read_conversations(std::istream& in);
std::vector<Conversation> read_conversations(const std::filesystem::path& path);

}  // namespace dcrl
