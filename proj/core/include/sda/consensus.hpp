#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "sda/error.hpp"
#include "sda/graph.hpp"
#include "sda/time.hpp"

namespace sda {

enum class RoleStrategy { DegreeMode, KCoreShell };

std::string_view to_string(RoleStrategy strategy);
std::optional<RoleStrategy> strategy_from_string(std::string_view text);

/// Partition of a snapshot's actuators (by actuator id, each list sorted).
struct RoleAssignment {
  std::vector<int> approvers;
  std::vector<int> verifiers;
  std::vector<int> idle;
  RoleStrategy strategy = RoleStrategy::DegreeMode;
  UtcTime snapshot_time;

  bool runnable() const { return !approvers.empty() && !verifiers.empty(); }
};

struct RoleCounts {
  std::size_t approvers = 1;
  std::size_t verifiers = 1;
};

/// ceil(10%) approvers and ceil(5%) verifiers, at least one each.
RoleCounts default_role_counts(std::size_t node_count);

/// Most frequent degree; the largest one when several tie.
int degree_mode(const ActuatorGraph& graph);

/// Ranks nodes by distance of their degree from the mode, then by higher
/// degree, then by lower actuator id; verifiers take the head of the ranking
/// and approvers the next slots. Throws PreconditionError when a count is
/// zero or the two exceed the node count.
RoleAssignment assign_roles_degree(const ActuatorGraph& graph, RoleCounts counts,
                                   UtcTime snapshot_time = {});

/// Raised when the (k_max - 1)-shell is empty. Callers may fall back to the
/// degree strategy.
class EmptyShellError : public PreconditionError {
 public:
  explicit EmptyShellError(int k_max);
  int k_max() const noexcept { return k_max_; }

 private:
  int k_max_;
};

/// Verifiers form the innermost core (coreness k_max), approvers the shell
/// just below it (coreness k_max - 1). Throws PreconditionError when
/// k_max < 2 and EmptyShellError when that shell is empty.
RoleAssignment assign_roles_kcore(const ActuatorGraph& graph, UtcTime snapshot_time = {});

__extension__ typedef unsigned __int128 uint128;

/// Element of Z_p with p = 2^128 - 159, the largest 128-bit prime.
struct FieldElement {
  uint128 value = 0;

  static constexpr uint128 modulus() {
    return ~static_cast<uint128>(0) - 158;
  }
  FieldElement operator+(FieldElement other) const;
  FieldElement& operator+=(FieldElement other) { return *this = *this + other; }
  bool operator==(const FieldElement&) const = default;
  std::string hex() const;
};

using NodeKey = std::array<std::uint8_t, 32>;
using Digest = std::array<std::uint8_t, 32>;
using Bytes = std::vector<std::uint8_t>;

Bytes to_bytes(std::string_view text);

/// Deterministic per-node key for the stand-in scheme.
NodeKey derive_node_key(int node_id, std::uint64_t key_seed);

Digest payload_digest(std::span<const std::uint8_t> payload);

struct SignatureShare {
  int node_id = 0;
  FieldElement value;
  Digest payload_digest{};
};

/// Keyed BLAKE2b of the payload reduced into Z_p.
SignatureShare sign(int node_id, const NodeKey& key, std::span<const std::uint8_t> payload);

/// How a participant treats the payload: honest nodes sign it unchanged,
/// tampering nodes sign the substitute bytes instead.
struct Behavior {
  std::optional<Bytes> tampered_payload;

  static Behavior honest() { return {}; }
  static Behavior tamper(Bytes substitute) { return Behavior{std::move(substitute)}; }
};

/// Copy of `payload` with byte `index` xor-ed with `mask` (mask must be non-zero).
Bytes flip_byte(std::span<const std::uint8_t> payload, std::size_t index, std::uint8_t mask = 1);

enum class Phase { Approval, Verification, Check, Done };
enum class Outcome { Valid, Repeat };

inline constexpr std::string_view kValidMessage = "Verification is valid!";
inline constexpr std::string_view kRepeatMessage = "Repeat Process!";

/// One pass of the approver/verifier protocol. Phases only move forward;
/// each step method throws InvariantError when called out of order.
class ConsensusRound {
 public:
  ConsensusRound(Bytes payload, RoleAssignment assignment, std::uint64_t key_seed = 0);

  /// Step 1: approvers sign their view of the payload and release shares.
  void run_approval(const std::map<int, Behavior>& behaviors);
  /// Step 2: verifiers confirm the released aggregate, then sign their view.
  void run_verification(const std::map<int, Behavior>& behaviors);
  /// Step 3: both aggregates are checked against recomputation over the
  /// canonical payload.
  void run_check();

  Phase phase() const noexcept { return phase_; }
  std::optional<Outcome> outcome() const noexcept { return outcome_; }
  std::string_view message() const;

  const Bytes& payload() const noexcept { return payload_; }
  const RoleAssignment& assignment() const noexcept { return assignment_; }
  const std::vector<SignatureShare>& approver_shares() const noexcept { return approver_shares_; }
  const std::vector<SignatureShare>& verifier_shares() const noexcept { return verifier_shares_; }
  /// Per verifier (in assignment order): did the released approver aggregate
  /// match its own recomputation?
  const std::vector<bool>& confirmations() const noexcept { return confirmations_; }
  FieldElement approver_aggregate() const noexcept { return approver_aggregate_; }
  FieldElement verifier_aggregate() const noexcept { return verifier_aggregate_; }

 private:
  void advance(Phase from, Phase to);
  NodeKey key(int node_id) const { return derive_node_key(node_id, key_seed_); }
  FieldElement expected_aggregate(std::span<const int> nodes, std::span<const std::uint8_t> view) const;

  Bytes payload_;
  RoleAssignment assignment_;
  std::uint64_t key_seed_;
  Phase phase_ = Phase::Approval;
  std::optional<Outcome> outcome_;
  std::vector<SignatureShare> approver_shares_;
  std::vector<SignatureShare> verifier_shares_;
  std::vector<bool> confirmations_;
  FieldElement approver_aggregate_;
  FieldElement verifier_aggregate_;
};

/// Runs all three steps. Throws PreconditionError when the assignment is not
/// runnable or names nodes absent from the graph.
ConsensusRound run_round(Bytes payload, const RoleAssignment& assignment,
                         const ActuatorGraph& graph,
                         const std::map<int, Behavior>& behaviors = {},
                         std::uint64_t key_seed = 0);

struct MessageCost {
  std::size_t approval = 0;
  std::size_t verification = 0;
  std::size_t total = 0;
  bool operator==(const MessageCost&) const = default;
};

/// One broadcast per approver and one per verifier.
MessageCost message_cost(const RoleAssignment& assignment);

/// Line-delimited transcript record for a finished round.
nlohmann::json transcript_record(const ConsensusRound& round);

}  // namespace sda
