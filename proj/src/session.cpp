#include "spatialprompt/session.hpp"

#include <algorithm>

namespace spatialprompt::session {

GenerationOutcome run_generation_job(const GenerationJob& job, const BackendConfig& config, Clock& clock,
                                     const ValidationTolerances& tolerances) {
  GenerationOutcome out;
  out.request_id = job.request_id;
  try {
    GenerationResult result = generate(job.request, config, clock);
    ValidationReport report = validate(result.mesh, job.request.constraint_set, tolerances);
    std::string encoded = base64_encode(export_mesh_obj(result.mesh));
    if (encoded.size() > kMaxAssetBase64Bytes) {
      out.failure = std::string(to_string(ErrorCode::AssetTooLarge));
      return out;
    }
    out.obj_base64 = std::move(encoded);
    out.report = std::move(report);
  } catch (const Error& e) {
    out.failure = std::string(to_string(e.code()));
  } catch (const std::exception&) {
    out.failure = std::string(to_string(ErrorCode::BackendRejected));
  }
  return out;
}

// ---------------------------------------------------------------------------

SessionCore::SessionCore(std::string session_id)
    : session_id_(std::move(session_id)), document_(SketchDocument::empty(session_id_)) {}

SessionMessage SessionCore::make(Payload payload) const { return {session_id_, "server", std::move(payload)}; }

void SessionCore::broadcast(Effects& fx, const Payload& payload) const {
  for (const auto& [conn, id] : connections_) fx.sends.emplace_back(conn, make(payload));
}

void SessionCore::reply(Effects& fx, ConnectionId conn, Payload payload) const {
  fx.sends.emplace_back(conn, make(std::move(payload)));
}

const Participant* SessionCore::participant_of(ConnectionId conn) const {
  auto it = connections_.find(conn);
  if (it == connections_.end()) return nullptr;
  for (const auto& p : participants_)
    if (p.participant_id == it->second) return &p;
  return nullptr;
}

SessionCore::Snapshot SessionCore::snapshot() const { return {canonical_serialize(document_), last_seq()}; }

Effects SessionCore::handle(ConnectionId conn, const SessionMessage& message) {
  Effects fx;
  if (message.session_id != session_id_) {
    reply(fx, conn, OpRejected{"", std::string(to_string(ErrorCode::ProtocolError))});
    return fx;
  }
  if (std::holds_alternative<Join>(message.payload)) return on_join(conn, message);

  const Participant* sender = participant_of(conn);
  if (sender == nullptr) {
    const auto* submit = std::get_if<SubmitOp>(&message.payload);
    reply(fx, conn, OpRejected{submit ? submit->op.op_id : "", std::string(to_string(ErrorCode::NotAParticipant))});
    return fx;
  }
  if (const auto* submit = std::get_if<SubmitOp>(&message.payload)) return on_submit(*sender, conn, *submit);
  if (const auto* trigger = std::get_if<TriggerGeneration>(&message.payload)) return on_trigger(conn, *trigger);
  if (std::holds_alternative<Leave>(message.payload)) return on_leave(conn);

  // Server-to-client message types are not accepted from clients.
  reply(fx, conn, OpRejected{"", std::string(to_string(ErrorCode::ProtocolError))});
  return fx;
}

Effects SessionCore::on_join(ConnectionId conn, const SessionMessage& message) {
  Effects fx;
  const std::string& id = message.sender_id;
  auto reject = [&](ErrorCode code) {
    reply(fx, conn, OpRejected{"", std::string(to_string(code))});
    return fx;
  };
  if (id.empty()) return reject(ErrorCode::ProtocolError);

  auto welcome = [&](const Participant& p) {
    Snapshot snap = snapshot();
    reply(fx, conn, Welcome{p.participant_id, p.color_index, std::move(snap.bytes), snap.last_seq, participants_});
  };

  if (auto bound = connections_.find(conn); bound != connections_.end()) {
    // A repeated Join on a live connection is a resync request.
    if (bound->second != id) return reject(ErrorCode::ProtocolError);
    welcome(*participant_of(conn));
    return fx;
  }
  const bool taken = std::any_of(participants_.begin(), participants_.end(),
                                 [&](const Participant& p) { return p.participant_id == id; });
  if (taken) return reject(ErrorCode::DuplicateParticipantId);
  if (participants_.size() >= kMaxParticipants) return reject(ErrorCode::SessionFull);

  const auto& join = std::get<Join>(message.payload);
  participants_.push_back({id, join.display_name, static_cast<int>(joins_ % kPalette.size())});
  ++joins_;
  for (const auto& [other, _] : connections_) fx.sends.emplace_back(other, make(PresenceUpdate{participants_}));
  connections_.emplace(conn, id);
  welcome(participants_.back());
  return fx;
}

Effects SessionCore::on_submit(const Participant& sender, ConnectionId conn, SubmitOp submit) {
  Effects fx;
  EditOp op = std::move(submit.op);
  op.author_id = sender.participant_id;
  op.seq = next_seq_;
  if (auto* add = std::get_if<AddStroke>(&op.kind)) {
    add->stroke.color_index = sender.color_index;
    add->stroke.author_id = sender.participant_id;
  }
  try {
    document_ = apply_op(document_, op);
  } catch (const Error& e) {
    reply(fx, conn, OpRejected{op.op_id, std::string(to_string(e.code()))});
    return fx;
  }
  ++next_seq_;
  broadcast(fx, OpApplied{std::move(op)});
  return fx;
}

Effects SessionCore::on_trigger(ConnectionId conn, const TriggerGeneration& trigger) {
  Effects fx;
  if (in_flight_) {
    reply(fx, conn, OpRejected{"", std::string(to_string(ErrorCode::GenerationBusy))});
    return fx;
  }
  GenerationJob job;
  try {
    if (document_.strokes.empty()) throw Error(ErrorCode::EmptySketch);
    job.request = assemble(compile(document_), trigger.prompt, trigger.seed);
  } catch (const Error& e) {
    GenerationStatus failed;
    failed.state = TaskState::Failed;
    failed.reason = std::string(to_string(e.code()));
    broadcast(fx, failed);
    return fx;
  }
  job.session_id = session_id_;
  job.request_id = job.request.request_id;
  job.source_revision = document_.revision;
  in_flight_ = job.request_id;
  broadcast(fx, GenerationStatus{job.request_id, TaskState::Pending, 0, std::nullopt});
  fx.job = std::move(job);
  return fx;
}

Effects SessionCore::on_leave(ConnectionId conn) {
  Effects fx;
  auto it = connections_.find(conn);
  if (it == connections_.end()) return fx;
  const std::string id = it->second;
  connections_.erase(it);
  std::erase_if(participants_, [&](const Participant& p) { return p.participant_id == id; });
  broadcast(fx, PresenceUpdate{participants_});
  return fx;
}

Effects SessionCore::disconnect(ConnectionId conn) { return on_leave(conn); }

Effects SessionCore::generation_started(const std::string& request_id) {
  Effects fx;
  if (in_flight_ == request_id) broadcast(fx, GenerationStatus{request_id, TaskState::Running, 0, std::nullopt});
  return fx;
}

Effects SessionCore::generation_finished(const GenerationOutcome& outcome) {
  Effects fx;
  if (in_flight_ != outcome.request_id) return fx;
  in_flight_.reset();
  if (outcome.failure || !outcome.obj_base64 || !outcome.report) {
    broadcast(fx, GenerationStatus{outcome.request_id, TaskState::Failed, std::nullopt,
                                   outcome.failure.value_or(std::string(to_string(ErrorCode::MalformedAsset)))});
    return fx;
  }
  broadcast(fx, GenerationStatus{outcome.request_id, TaskState::Succeeded, 100, std::nullopt});
  broadcast(fx, AssetReady{outcome.request_id, *outcome.obj_base64, *outcome.report});
  return fx;
}

// ---------------------------------------------------------------------------

SessionCore& SessionRegistry::open(const std::string& session_id) {
  return sessions_.try_emplace(session_id, session_id).first->second;
}

SessionCore* SessionRegistry::find(const std::string& session_id) {
  auto it = sessions_.find(session_id);
  return it == sessions_.end() ? nullptr : &it->second;
}

SessionCore::Snapshot SessionRegistry::session_snapshot(const std::string& session_id) const {
  auto it = sessions_.find(session_id);
  if (it == sessions_.end()) throw Error(ErrorCode::UnknownSession, session_id);
  return it->second.snapshot();
}

// ---------------------------------------------------------------------------

SessionClient::SessionClient(std::string session_id, std::string participant_id, std::string display_name)
    : session_id_(std::move(session_id)),
      participant_id_(std::move(participant_id)),
      display_name_(std::move(display_name)),
      document_(SketchDocument::empty(session_id_)) {}

SessionMessage SessionClient::make(Payload payload) const { return {session_id_, participant_id_, std::move(payload)}; }

SessionMessage SessionClient::join() {
  phase_ = phase_ == ClientPhase::Disconnected ? ClientPhase::Joining : ClientPhase::Resyncing;
  return make(Join{display_name_});
}

std::optional<SessionMessage> SessionClient::submit(EditOp op) {
  if (phase_ != ClientPhase::Synced) return std::nullopt;
  op.author_id = participant_id_;
  op.seq.reset();
  pending_.push_back(op);
  return make(SubmitOp{std::move(op)});
}

SessionMessage SessionClient::trigger_generation(SemanticPrompt prompt, std::uint64_t seed) const {
  return make(TriggerGeneration{std::move(prompt), seed});
}

SessionMessage SessionClient::leave() {
  phase_ = ClientPhase::Disconnected;
  return make(Leave{});
}

ClientEffects SessionClient::apply(const SessionMessage& message) {
  ClientEffects fx;
  auto drop_pending = [&](const std::string& op_id) {
    auto it = std::find_if(pending_.begin(), pending_.end(), [&](const EditOp& op) { return op.op_id == op_id; });
    if (it != pending_.end()) pending_.erase(it);
  };
  auto resync = [&] {
    ++resyncs_;
    fx.sends.push_back(join());
  };

  if (const auto* welcome = std::get_if<Welcome>(&message.payload)) {
    document_ = parse_document(welcome->snapshot);
    last_seq_ = welcome->last_seq;
    color_index_ = welcome->color_index;
    participants_ = welcome->participants;
    phase_ = ClientPhase::Synced;
    for (const auto& op : document_.op_log) drop_pending(op.op_id);
  } else if (const auto* applied = std::get_if<OpApplied>(&message.payload)) {
    if (phase_ != ClientPhase::Synced || !applied->op.seq) return fx;
    const std::int64_t seq = *applied->op.seq;
    if (seq <= last_seq_) return fx;  // already covered by a snapshot
    if (seq != last_seq_ + 1) {
      resync();
      return fx;
    }
    try {
      document_ = apply_op(document_, applied->op);
    } catch (const Error&) {
      resync();
      return fx;
    }
    last_seq_ = seq;
    drop_pending(applied->op.op_id);
  } else if (const auto* rejected = std::get_if<OpRejected>(&message.payload)) {
    rejections_.push_back(*rejected);
    if (!rejected->op_id.empty()) drop_pending(rejected->op_id);
  } else if (const auto* status = std::get_if<GenerationStatus>(&message.payload)) {
    generation_updates_.push_back(*status);
  } else if (const auto* asset = std::get_if<AssetReady>(&message.payload)) {
    assets_.push_back(*asset);
  } else if (const auto* presence = std::get_if<PresenceUpdate>(&message.payload)) {
    participants_ = presence->participants;
  }
  return fx;
}

SketchDocument SessionClient::overlay() const {
  SketchDocument doc = document_;
  for (const auto& op : pending_) {
    try {
      doc = apply_op(doc, op);
    } catch (const Error&) {
      // Superseded by a concurrent edit; the server will reject it.
    }
  }
  return doc;
}

}  // namespace spatialprompt::session
