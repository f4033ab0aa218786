#include "dcrl/core/conversation_io.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

namespace dcrl {

namespace {

nlohmann::json optional_string(const std::optional<std::string>& s) {
  return s ? nlohmann::json(*s) : nlohmann::json(nullptr);
}

std::optional<std::string> read_optional_string(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<std::string>();
}

}  // namespace

nlohmann::json to_json(const DialogueAct& act) {
  return {{"kind", std::string(to_string(act.kind))}, {"entity", optional_string(act.entity)}};
}

nlohmann::json to_json(const Candidate& c) {
  return {{"text", c.text},
          {"act", std::string(to_string(c.act.kind))},
          {"act_entity", optional_string(c.act.entity)},
          {"provider_id", c.provider_id},
          {"offers_focus_change", c.offers_focus_change},
          {"target_entity", optional_string(c.target_entity)},
          {"token_count", c.token_count},
          {"content_id", c.content_id}};
}

Candidate candidate_from_json(const nlohmann::json& j) {
  DialogueAct act(act_kind_from_string(j.at("act").get<std::string>()), read_optional_string(j, "act_entity"));
  Candidate c = Candidate::make(j.at("text").get<std::string>(), std::move(act),
                                j.at("provider_id").get<std::string>(), j.value("content_id", std::string{}));
  if (j.contains("offers_focus_change")) c.offers_focus_change = j.at("offers_focus_change").get<bool>();
  c.target_entity = read_optional_string(j, "target_entity");
  return c;
}

nlohmann::json to_json(const Conversation& conv) {
  nlohmann::json turns = nlohmann::json::array();
  for (const auto& turn : conv.turns) {
    nlohmann::json utts = nlohmann::json::array();
    for (const auto& u : turn.utterances) {
      utts.push_back({{"text", u.text},
                      {"act", u.act ? nlohmann::json(std::string(to_string(u.act->kind))) : nlohmann::json(nullptr)},
                      {"act_entity", u.act ? optional_string(u.act->entity) : nlohmann::json(nullptr)},
                      {"provider_id", u.provider_id},
                      {"content_id", u.content_id},
                      {"rating", u.rating ? nlohmann::json(*u.rating) : nlohmann::json(nullptr)}});
    }
    turns.push_back({{"speaker", turn.speaker == Speaker::User ? "user" : "bot"},
                     {"focus_after", optional_string(turn.focus_after)},
                     {"utterances", std::move(utts)}});
  }
  return {{"user_profile_id", optional_string(conv.user_profile_id)},
          {"ended_reason", std::string(to_string(conv.ended_reason))},
          {"turns", std::move(turns)}};
}

Conversation conversation_from_json(const nlohmann::json& j) {
  Conversation conv;
  conv.user_profile_id = read_optional_string(j, "user_profile_id");
  conv.ended_reason = end_reason_from_string(j.at("ended_reason").get<std::string>());
  for (const auto& jt : j.at("turns")) {
    Turn turn;
    const auto speaker = jt.at("speaker").get<std::string>();
    if (speaker == "user")
      turn.speaker = Speaker::User;
    else if (speaker == "bot")
      turn.speaker = Speaker::Bot;
    else
      throw std::invalid_argument("unknown speaker: " + speaker);
    turn.focus_after = read_optional_string(jt, "focus_after");
    for (const auto& ju : jt.at("utterances")) {
      Utterance u;
      u.text = ju.at("text").get<std::string>();
      if (ju.contains("act") && !ju.at("act").is_null())
        u.act = DialogueAct(act_kind_from_string(ju.at("act").get<std::string>()), read_optional_string(ju, "act_entity"));
      u.provider_id = ju.value("provider_id", std::string{});
      u.content_id = ju.value("content_id", std::string{});
      if (ju.contains("rating") && !ju.at("rating").is_null()) u.rating = ju.at("rating").get<int>();
      turn.utterances.push_back(std::move(u));
    }
    conv.turns.push_back(std::move(turn));
  }
  return conv;
}

void write_conversations(std::ostream& out, const std::vector<Conversation>& conversations) {
  for (const auto& c : conversations) out << to_json(c).dump() << '\n';
}

void write_conversations(const std::filesystem::path& path, const std::vector<Conversation>& conversations) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_conversations(out, conversations);
}

std::vector<Conversation> read_conversations(std::istream& in) {
  std::vector<Conversation> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    out.push_back(conversation_from_json(nlohmann::json::parse(line)));
  }
  return out;
}

std::vector<Conversation> read_conversations(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  return read_conversations(in);
}

}  // namespace dcrl
