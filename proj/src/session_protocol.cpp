#include "spatialprompt/session.hpp"

namespace spatialprompt::session {

namespace {

constexpr ErrorCode kProto = ErrorCode::ProtocolError;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

Json participants_json(const std::vector<Participant>& ps) {
  Json out = Json::array();
  for (const auto& p : ps)
    out.push_back(Json{{"color_index", p.color_index},
                       {"display_name", p.display_name},
                       {"participant_id", p.participant_id}});
  return out;
}

std::vector<Participant> participants_from(const Json& v) {
  using namespace json_io;
  if (!v.is_array()) throw Error(kProto, "participants must be an array");
  std::vector<Participant> out;
  for (const auto& jp : v)
    out.push_back({string(field(jp, "participant_id", kProto), kProto),
                   jp.contains("display_name") ? string(jp["display_name"], kProto) : std::string(),
                   static_cast<int>(integer(field(jp, "color_index", kProto), kProto))});
  return out;
}

Json payload_json(const Payload& payload) {
  return std::visit(
      Overloaded{
          [](const Join& m) { return Json{{"display_name", m.display_name}}; },
          [](const Welcome& m) {
            return Json{{"color_index", m.color_index},
                        {"last_seq", m.last_seq},
                        {"participant_id", m.participant_id},
                        {"participants", participants_json(m.participants)},
                        {"snapshot", m.snapshot}};
          },
          [](const SubmitOp& m) { return Json{{"op", to_json(m.op)}}; },
          [](const OpApplied& m) { return Json{{"op", to_json(m.op)}}; },
          [](const OpRejected& m) { return Json{{"op_id", m.op_id}, {"reason", m.reason}}; },
          [](const TriggerGeneration& m) {
            Json out{{"prompt", m.prompt.text}, {"seed", m.seed}, {"style_tags", m.prompt.style_tags}};
            if (m.prompt.negative_text) out["negative_text"] = *m.prompt.negative_text;
            return out;
          },
          [](const GenerationStatus& m) {
            Json out{{"request_id", m.request_id}, {"state", to_string(m.state)}};
            if (m.progress) out["progress"] = *m.progress;
            if (m.reason) out["reason"] = *m.reason;
            return out;
          },
          [](const AssetReady& m) {
            return Json{{"obj_base64", m.obj_base64}, {"report", to_json(m.report)}, {"request_id", m.request_id}};
          },
          [](const PresenceUpdate& m) { return Json{{"participants", participants_json(m.participants)}}; },
          [](const Leave&) { return Json::object(); },
      },
      payload);
}

}  // namespace

std::string_view type_name(const Payload& payload) {
  return std::visit(Overloaded{
                        [](const Join&) { return std::string_view("Join"); },
                        [](const Welcome&) { return std::string_view("Welcome"); },
                        [](const SubmitOp&) { return std::string_view("SubmitOp"); },
                        [](const OpApplied&) { return std::string_view("OpApplied"); },
                        [](const OpRejected&) { return std::string_view("OpRejected"); },
                        [](const TriggerGeneration&) { return std::string_view("TriggerGeneration"); },
                        [](const GenerationStatus&) { return std::string_view("GenerationStatus"); },
                        [](const AssetReady&) { return std::string_view("AssetReady"); },
                        [](const PresenceUpdate&) { return std::string_view("PresenceUpdate"); },
                        [](const Leave&) { return std::string_view("Leave"); },
                    },
                    payload);
}

std::string encode(const SessionMessage& message) {
  return canonical_dump(Json{{"payload", payload_json(message.payload)},
                             {"sender_id", message.sender_id},
                             {"session_id", message.session_id},
                             {"type", type_name(message.payload)}});
}

SessionMessage decode(std::string_view frame) {
  using namespace json_io;
  const Json v = parse_object(frame, kProto);
  SessionMessage msg;
  msg.session_id = string(field(v, "session_id", kProto), kProto);
  msg.sender_id = v.contains("sender_id") ? string(v["sender_id"], kProto) : std::string();
  const std::string type = string(field(v, "type", kProto), kProto);
  const Json p = v.contains("payload") ? v["payload"] : Json::object();
  if (!p.is_object()) throw Error(kProto, "payload must be an object");

  if (type == "Join") {
    msg.payload = Join{p.contains("display_name") ? string(p["display_name"], kProto) : std::string()};
  } else if (type == "Welcome") {
    msg.payload = Welcome{string(field(p, "participant_id", kProto), kProto),
                          static_cast<int>(integer(field(p, "color_index", kProto), kProto)),
                          string(field(p, "snapshot", kProto), kProto),
                          integer(field(p, "last_seq", kProto), kProto),
                          participants_from(field(p, "participants", kProto))};
  } else if (type == "SubmitOp") {
    msg.payload = SubmitOp{edit_op_from_json(field(p, "op", kProto), kProto)};
  } else if (type == "OpApplied") {
    msg.payload = OpApplied{edit_op_from_json(field(p, "op", kProto), kProto)};
  } else if (type == "OpRejected") {
    msg.payload = OpRejected{string(field(p, "op_id", kProto), kProto), string(field(p, "reason", kProto), kProto)};
  } else if (type == "TriggerGeneration") {
    TriggerGeneration t;
    t.prompt.text = string(field(p, "prompt", kProto), kProto);
    if (p.contains("style_tags"))
      for (const auto& tag : p["style_tags"]) t.prompt.style_tags.push_back(string(tag, kProto));
    if (p.contains("negative_text")) t.prompt.negative_text = string(p["negative_text"], kProto);
    t.seed = p.contains("seed") ? unsigned_integer(p["seed"], kProto) : 0;
    msg.payload = std::move(t);
  } else if (type == "GenerationStatus") {
    GenerationStatus s;
    s.request_id = string(field(p, "request_id", kProto), kProto);
    try {
      s.state = parse_task_state(string(field(p, "state", kProto), kProto));
    } catch (const Error& e) {
      throw Error(kProto, e.what());
    }
    if (p.contains("progress")) s.progress = static_cast<int>(integer(p["progress"], kProto));
    if (p.contains("reason")) s.reason = string(p["reason"], kProto);
    msg.payload = std::move(s);
  } else if (type == "AssetReady") {
    AssetReady a;
    a.request_id = string(field(p, "request_id", kProto), kProto);
    a.obj_base64 = string(field(p, "obj_base64", kProto), kProto);
    try {
      a.report = parse_report(canonical_dump(field(p, "report", kProto)));
    } catch (const Error& e) {
      throw Error(kProto, e.what());
    }
    msg.payload = std::move(a);
  } else if (type == "PresenceUpdate") {
    msg.payload = PresenceUpdate{participants_from(field(p, "participants", kProto))};
  } else if (type == "Leave") {
    msg.payload = Leave{};
  } else {
    throw Error(kProto, "unknown message type '" + type + "'");
  }
  return msg;
}

}  // namespace spatialprompt::session
