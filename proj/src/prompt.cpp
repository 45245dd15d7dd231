#include "spatialprompt/prompt.hpp"

#include <cstdio>

namespace spatialprompt {

namespace {

constexpr ErrorCode kReq = ErrorCode::MalformedRequest;

// Code points in a valid UTF-8 string, or nullopt when the bytes are not UTF-8.
std::optional<std::size_t> utf8_length(std::string_view s) {
  std::size_t count = 0;
  for (std::size_t i = 0; i < s.size();) {
    const auto c = static_cast<unsigned char>(s[i]);
    std::size_t len = c < 0x80 ? 1 : (c >> 5) == 0x6 ? 2 : (c >> 4) == 0xe ? 3 : (c >> 3) == 0x1e ? 4 : 0;
    if (len == 0 || i + len > s.size()) return std::nullopt;
    for (std::size_t k = 1; k < len; ++k)
      if ((static_cast<unsigned char>(s[i + k]) & 0xc0) != 0x80) return std::nullopt;
    i += len;
    ++count;
  }
  return count;
}

bool is_blank(std::string_view s) {
  return s.find_first_not_of(" \t\r\n\f\v") == std::string_view::npos;
}

std::string fixed2(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

Json prompt_json(const SemanticPrompt& p) {
  Json out{{"style_tags", p.style_tags}, {"text", p.text}};
  if (p.negative_text) out["negative_text"] = *p.negative_text;
  return out;
}

Json request_body(const GenerationRequest& req) {
  return Json{{"backend_hints", req.backend_hints},
              {"constraint_set", to_json(req.constraint_set)},
              {"seed", req.seed},
              {"semantic_prompt", prompt_json(req.semantic_prompt)},
              {"target_face_count", req.target_face_count}};
}

void check_utf8(std::string_view s) {
  if (!utf8_length(s)) throw Error(kReq, "text is not valid UTF-8");
}

}  // namespace

void check_prompt(const SemanticPrompt& prompt) {
  if (is_blank(prompt.text)) throw Error(ErrorCode::MissingSemanticPrompt);
  const auto length = utf8_length(prompt.text);
  if (!length) throw Error(kReq, "prompt text is not valid UTF-8");
  if (*length > kMaxPromptChars) throw Error(kReq, "prompt text exceeds 2000 characters");
  for (const auto& tag : prompt.style_tags) check_utf8(tag);
  if (prompt.negative_text) check_utf8(*prompt.negative_text);
}

std::string compute_request_id(const GenerationRequest& req) {
  return sha256_hex(canonical_dump(request_body(req))).substr(0, 16);
}

GenerationRequest assemble(const ConstraintSet& cs, const SemanticPrompt& prompt, std::uint64_t seed,
                           const AssembleOptions& options) {
  check_prompt(prompt);
  if (cs.components.empty()) throw Error(ErrorCode::InvalidConstraintSet, "no components");
  // Round-tripping through the validating parser rejects broken sets.
  try {
    constraints_from_json(to_json(cs), ErrorCode::InvalidConstraintSet);
  } catch (const Error& e) {
    throw Error(ErrorCode::InvalidConstraintSet, e.what());
  }
  if (options.target_face_count <= 0) throw Error(kReq, "target_face_count must be positive");
  for (const auto& [k, v] : options.backend_hints) {
    check_utf8(k);
    check_utf8(v);
  }

  GenerationRequest req;
  req.constraint_set = cs;
  req.semantic_prompt = prompt;
  req.seed = seed;
  req.target_face_count = options.target_face_count;
  req.backend_hints = options.backend_hints;
  req.request_id = compute_request_id(req);
  return req;
}

std::string render_constraint_text(const ConstraintSet& cs) {
  const auto& h = cs.global_box.half_extents;
  std::string out = "overall bounds " + fixed2(2 * h[0]) + " x " + fixed2(2 * h[1]) + " x " +
                    fixed2(2 * h[2]) + " m";
  for (const auto& c : cs.components) {
    const double m = c.extents_sorted[0];
    out += "; component " + std::to_string(c.component_id) + " (" +
           (c.hardness == Hardness::Retain ? "retain" : "guide") + ") aspect " +
           fixed2(c.extents_sorted[0] / m) + ":" + fixed2(c.extents_sorted[1] / m) + ":" +
           fixed2(c.extents_sorted[2] / m);
  }
  for (const auto& r : cs.relations) {
    const char* verb = r.kind == RelationKind::Above      ? " above "
                       : r.kind == RelationKind::Contains ? " contains "
                                                          : " adjacent to ";
    out += "; component " + std::to_string(r.subject) + verb + "component " + std::to_string(r.object);
  }
  return out;
}

std::string render_backend_prompt(const GenerationRequest& req) {
  const auto& p = req.semantic_prompt;
  std::string out = p.text;
  if (!p.style_tags.empty()) {
    out += ". style: ";
    for (std::size_t i = 0; i < p.style_tags.size(); ++i) out += (i ? ", " : "") + p.style_tags[i];
  }
  if (p.negative_text) out += ". avoid: " + *p.negative_text;
  out += ". spatial layout: " + render_constraint_text(req.constraint_set);
  return out;
}

Json to_json(const GenerationRequest& req) {
  Json out = request_body(req);
  out["request_id"] = req.request_id;
  return out;
}

std::string canonical_request_bytes(const GenerationRequest& req) { return canonical_dump(to_json(req)); }

GenerationRequest parse_request(std::string_view bytes) {
  using namespace json_io;
  const Json v = parse_object(bytes, kReq);
  GenerationRequest req;
  req.request_id = string(field(v, "request_id", kReq), kReq);
  try {
    req.constraint_set = constraints_from_json(field(v, "constraint_set", kReq), kReq);
  } catch (const Error& e) {
    throw Error(kReq, e.what());
  }
  req.seed = unsigned_integer(field(v, "seed", kReq), kReq);
  req.target_face_count = integer(field(v, "target_face_count", kReq), kReq);
  const Json& hints = field(v, "backend_hints", kReq);
  if (!hints.is_object()) throw Error(kReq, "backend_hints must be an object");
  for (const auto& [k, hv] : hints.items()) req.backend_hints[k] = string(hv, kReq);

  const Json& sp = field(v, "semantic_prompt", kReq);
  req.semantic_prompt.text = string(field(sp, "text", kReq), kReq);
  for (const auto& t : field(sp, "style_tags", kReq)) req.semantic_prompt.style_tags.push_back(string(t, kReq));
  if (sp.contains("negative_text")) req.semantic_prompt.negative_text = string(sp["negative_text"], kReq);
  try {
    check_prompt(req.semantic_prompt);
  } catch (const Error& e) {
    throw Error(kReq, e.what());
  }
  if (req.request_id != compute_request_id(req)) throw Error(kReq, "request_id does not match content");
  return req;
}

}  // namespace spatialprompt
