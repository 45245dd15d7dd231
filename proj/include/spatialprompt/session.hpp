#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "spatialprompt/backend.hpp"
#include "spatialprompt/sketch.hpp"
#include "spatialprompt/validator.hpp"

namespace spatialprompt::session {

inline constexpr std::size_t kMaxParticipants = 16;
inline constexpr std::size_t kMaxAssetBase64Bytes = 10u * 1024u * 1024u;
inline constexpr std::array<std::string_view, 10> kPalette{
    "#e6194b", "#3cb44b", "#ffe119", "#4363d8", "#f58231",
    "#911eb4", "#46f0f0", "#f032e6", "#bcf60c", "#fabebe"};

struct Participant {
  std::string participant_id;
  std::string display_name;
  int color_index = 0;
  friend bool operator==(const Participant&, const Participant&) = default;
};

// ---------------------------------------------------------------------------
// Wire messages. One JSON object per frame:
//   {"type": ..., "session_id": ..., "sender_id": ..., "payload": {...}}

struct Join {
  std::string display_name;
};
struct Welcome {
  std::string participant_id;
  int color_index = 0;
  std::string snapshot;  // canonical document bytes
  std::int64_t last_seq = 0;
  std::vector<Participant> participants;
};
struct SubmitOp {
  EditOp op;
};
struct OpApplied {
  EditOp op;  // carries seq
};
struct OpRejected {
  std::string op_id;
  std::string reason;
};
struct TriggerGeneration {
  SemanticPrompt prompt;
  std::uint64_t seed = 0;
};
struct GenerationStatus {
  std::string request_id;
  TaskState state = TaskState::Pending;
  std::optional<int> progress;
  std::optional<std::string> reason;
};
struct AssetReady {
  std::string request_id;
  std::string obj_base64;
  ValidationReport report;
};
struct PresenceUpdate {
  std::vector<Participant> participants;
};
struct Leave {};

using Payload = std::variant<Join, Welcome, SubmitOp, OpApplied, OpRejected, TriggerGeneration, GenerationStatus,
                             AssetReady, PresenceUpdate, Leave>;

struct SessionMessage {
  std::string session_id;
  std::string sender_id;
  Payload payload;
};

std::string_view type_name(const Payload& payload);
std::string encode(const SessionMessage& message);
/// Unknown fields are ignored; unknown types or bad shapes throw Error{ProtocolError}.
SessionMessage decode(std::string_view frame);

// ---------------------------------------------------------------------------
// Server

using ConnectionId = std::uint64_t;

struct GenerationJob {
  std::string session_id;
  std::string request_id;
  GenerationRequest request;
  std::int64_t source_revision = 0;
};

struct GenerationOutcome {
  std::string request_id;
  std::optional<std::string> obj_base64;
  std::optional<ValidationReport> report;
  std::optional<std::string> failure;  // ErrorCode name
};

/// Generates, validates and encodes an asset; every failure becomes `failure`.
GenerationOutcome run_generation_job(const GenerationJob& job, const BackendConfig& config, Clock& clock,
                                     const ValidationTolerances& tolerances = {});

struct Effects {
  std::vector<std::pair<ConnectionId, SessionMessage>> sends;
  std::optional<GenerationJob> job;
};

/// Authoritative state of one shared sketch. Not thread-safe: callers feed it
/// from a single ordered event queue.
class SessionCore {
 public:
  explicit SessionCore(std::string session_id);

  Effects handle(ConnectionId conn, const SessionMessage& message);
  /// Transport-level close; equivalent to Leave.
  Effects disconnect(ConnectionId conn);
  Effects generation_started(const std::string& request_id);
  Effects generation_finished(const GenerationOutcome& outcome);

  const std::string& session_id() const { return session_id_; }
  const SketchDocument& document() const { return document_; }
  std::int64_t last_seq() const { return next_seq_ - 1; }
  const std::vector<Participant>& participants() const { return participants_; }
  std::optional<std::string> generation_in_flight() const { return in_flight_; }

  struct Snapshot {
    std::string bytes;
    std::int64_t last_seq = 0;
  };
  Snapshot snapshot() const;

 private:
  SessionMessage make(Payload payload) const;
  void broadcast(Effects& fx, const Payload& payload) const;
  void reply(Effects& fx, ConnectionId conn, Payload payload) const;
  Effects on_join(ConnectionId conn, const SessionMessage& message);
  Effects on_submit(const Participant& sender, ConnectionId conn, SubmitOp submit);
  Effects on_trigger(ConnectionId conn, const TriggerGeneration& trigger);
  Effects on_leave(ConnectionId conn);
  const Participant* participant_of(ConnectionId conn) const;

  std::string session_id_;
  SketchDocument document_;
  std::int64_t next_seq_ = 1;
  std::uint64_t joins_ = 0;
  std::vector<Participant> participants_;
  std::map<ConnectionId, std::string> connections_;  // connection -> participant id
  std::optional<std::string> in_flight_;
};

/// Sessions keyed by id; a session is created on its first Join.
class SessionRegistry {
 public:
  SessionCore& open(const std::string& session_id);
  SessionCore* find(const std::string& session_id);
  /// Throws Error{UnknownSession}.
  SessionCore::Snapshot session_snapshot(const std::string& session_id) const;

 private:
  std::map<std::string, SessionCore> sessions_;
};

// ---------------------------------------------------------------------------
// Client

enum class ClientPhase { Disconnected, Joining, Synced, Resyncing };

struct ClientEffects {
  std::vector<SessionMessage> sends;
};

/// Client replica. The digested document is always snapshot + acknowledged
/// ops in server order; unacknowledged ops live only in the pending overlay.
class SessionClient {
 public:
  SessionClient(std::string session_id, std::string participant_id, std::string display_name);

  SessionMessage join();
  /// Queues `op` as pending and returns the SubmitOp frame; nullopt unless Synced.
  std::optional<SessionMessage> submit(EditOp op);
  SessionMessage trigger_generation(SemanticPrompt prompt, std::uint64_t seed) const;
  SessionMessage leave();

  /// Applies one server frame; returns frames to send (a resync Join on a sequence gap).
  ClientEffects apply(const SessionMessage& message);

  ClientPhase phase() const { return phase_; }
  const SketchDocument& document() const { return document_; }
  /// Document with pending ops applied on top (ops that no longer apply are skipped).
  SketchDocument overlay() const;
  std::int64_t last_seq() const { return last_seq_; }
  const std::deque<EditOp>& pending() const { return pending_; }
  int color_index() const { return color_index_; }
  const std::string& participant_id() const { return participant_id_; }
  const std::vector<Participant>& participants() const { return participants_; }
  const std::vector<OpRejected>& rejections() const { return rejections_; }
  const std::vector<GenerationStatus>& generation_updates() const { return generation_updates_; }
  const std::vector<AssetReady>& assets() const { return assets_; }
  std::size_t resync_count() const { return resyncs_; }

 private:
  SessionMessage make(Payload payload) const;

  std::string session_id_;
  std::string participant_id_;
  std::string display_name_;
  ClientPhase phase_ = ClientPhase::Disconnected;
  SketchDocument document_;
  std::int64_t last_seq_ = 0;
  std::deque<EditOp> pending_;
  int color_index_ = 0;
  std::vector<Participant> participants_;
  std::vector<OpRejected> rejections_;
  std::vector<GenerationStatus> generation_updates_;
  std::vector<AssetReady> assets_;
  std::size_t resyncs_ = 0;
};

}  // namespace spatialprompt::session
