#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "spatialprompt/constraints.hpp"

namespace spatialprompt {

inline constexpr std::size_t kMaxPromptChars = 2000;
inline constexpr std::int64_t kDefaultFaceCount = 20000;

/// The language half of a composite prompt.
struct SemanticPrompt {
  std::string text;
  std::vector<std::string> style_tags;
  std::optional<std::string> negative_text;
  friend bool operator==(const SemanticPrompt&, const SemanticPrompt&) = default;
};

/// Throws MissingSemanticPrompt for blank text, MalformedRequest for oversize text.
void check_prompt(const SemanticPrompt& prompt);

struct AssembleOptions {
  std::int64_t target_face_count = kDefaultFaceCount;
  std::map<std::string, std::string> backend_hints;
};

struct GenerationRequest {
  std::string request_id;
  ConstraintSet constraint_set;
  SemanticPrompt semantic_prompt;
  std::uint64_t seed = 0;
  std::int64_t target_face_count = kDefaultFaceCount;
  std::map<std::string, std::string> backend_hints;
  friend bool operator==(const GenerationRequest&, const GenerationRequest&) = default;
};

/// request_id = first 16 hex chars of SHA-256 over the canonical request bytes
/// with the request_id field omitted.
GenerationRequest assemble(const ConstraintSet& cs, const SemanticPrompt& prompt, std::uint64_t seed,
                           const AssembleOptions& options = {});

std::string compute_request_id(const GenerationRequest& req);

/// e.g. "overall bounds 1.02 x 0.51 x 0.51 m; component 1 (retain) aspect 1.00:0.50:0.25"
std::string render_constraint_text(const ConstraintSet& cs);

/// Single-string prompt for text-only backends: semantic text, style, negatives, constraints.
std::string render_backend_prompt(const GenerationRequest& req);

Json to_json(const GenerationRequest& req);
std::string canonical_request_bytes(const GenerationRequest& req);
/// Throws MalformedRequest, including when request_id does not match the content.
GenerationRequest parse_request(std::string_view bytes);

}  // namespace spatialprompt
