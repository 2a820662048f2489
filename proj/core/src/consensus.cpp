#include "sda/consensus.hpp"

#include <sodium.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <set>
#include <tuple>

namespace sda {

namespace {

void ensure_sodium() {
  static std::once_flag once;
  std::call_once(once, [] {
    if (sodium_init() < 0) throw InvariantError("libsodium failed to initialize");
  });
}

std::vector<int> sorted(std::vector<int> v) {
  std::sort(v.begin(), v.end());
  return v;
}

const Behavior& behavior_of(const std::map<int, Behavior>& behaviors, int node) {
  static const Behavior kHonest{};
  const auto it = behaviors.find(node);
  return it == behaviors.end() ? kHonest : it->second;
}

std::span<const std::uint8_t> view_of(const Behavior& b, const Bytes& canonical) {
  return b.tampered_payload ? std::span<const std::uint8_t>(*b.tampered_payload)
                            : std::span<const std::uint8_t>(canonical);
}

}  // namespace

std::string_view to_string(RoleStrategy strategy) {
  return strategy == RoleStrategy::DegreeMode ? "degree" : "kcore";
}

std::optional<RoleStrategy> strategy_from_string(std::string_view text) {
  if (text == "degree") return RoleStrategy::DegreeMode;
  if (text == "kcore") return RoleStrategy::KCoreShell;
  return std::nullopt;
}

RoleCounts default_role_counts(std::size_t node_count) {
  const auto share = [&](double fraction) {
    return std::max<std::size_t>(
        1, static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(node_count) - 1e-9)));
  };
  return RoleCounts{share(0.10), share(0.05)};
}

int degree_mode(const ActuatorGraph& graph) {
  std::map<int, std::size_t> counts;
  for (std::size_t i = 0; i < graph.node_count(); ++i) ++counts[static_cast<int>(graph.degree(i))];
  int mode = 0;
  std::size_t best = 0;
  for (const auto& [degree, count] : counts) {
    if (count >= best) {  // ascending degrees: ties resolve to the largest
      best = count;
      mode = degree;
    }
  }
  return mode;
}

RoleAssignment assign_roles_degree(const ActuatorGraph& graph, RoleCounts counts,
                                   UtcTime snapshot_time) {
  const std::size_t n = graph.node_count();
  if (counts.approvers == 0 || counts.verifiers == 0) {
    throw PreconditionError("approver and verifier counts must be at least 1");
  }
  if (counts.approvers + counts.verifiers > n) {
    throw PreconditionError("requested " + std::to_string(counts.approvers) + " approvers and " +
                            std::to_string(counts.verifiers) + " verifiers but the snapshot has " +
                            std::to_string(n) + " nodes");
  }
  const int mode = degree_mode(graph);
  const auto& ids = graph.node_ids();
  std::vector<std::size_t> ranking(n);
  for (std::size_t i = 0; i < n; ++i) ranking[i] = i;
  auto key = [&](std::size_t i) {
    const int d = static_cast<int>(graph.degree(i));
    return std::tuple(std::abs(d - mode), -d, ids[i]);
  };
  std::sort(ranking.begin(), ranking.end(), [&](std::size_t a, std::size_t b) { return key(a) < key(b); });

  RoleAssignment out;
  out.strategy = RoleStrategy::DegreeMode;
  out.snapshot_time = snapshot_time;
  for (std::size_t r = 0; r < n; ++r) {
    const int id = ids[ranking[r]];
    if (r < counts.verifiers) {
      out.verifiers.push_back(id);
    } else if (r < counts.verifiers + counts.approvers) {
      out.approvers.push_back(id);
    } else {
      out.idle.push_back(id);
    }
  }
  out.approvers = sorted(std::move(out.approvers));
  out.verifiers = sorted(std::move(out.verifiers));
  out.idle = sorted(std::move(out.idle));
  return out;
}

EmptyShellError::EmptyShellError(int k_max)
    : PreconditionError("k-core shell " + std::to_string(k_max - 1) +
                        " is empty; no approvers below the " + std::to_string(k_max) + "-core"),
      k_max_(k_max) {}

RoleAssignment assign_roles_kcore(const ActuatorGraph& graph, UtcTime snapshot_time) {
  const std::vector<int> core = kcore_decomposition(graph);
  const int k_max = core.empty() ? 0 : *std::max_element(core.begin(), core.end());
  if (k_max < 2) {
    throw PreconditionError("no two-tier core structure: maximum coreness is " +
                            std::to_string(k_max) + ", need at least 2");
  }
  RoleAssignment out;
  out.strategy = RoleStrategy::KCoreShell;
  out.snapshot_time = snapshot_time;
  const auto& ids = graph.node_ids();
  for (std::size_t i = 0; i < core.size(); ++i) {
    if (core[i] == k_max) {
      out.verifiers.push_back(ids[i]);
    } else if (core[i] == k_max - 1) {
      out.approvers.push_back(ids[i]);
    } else {
      out.idle.push_back(ids[i]);
    }
  }
  if (out.approvers.empty()) throw EmptyShellError(k_max);
  out.approvers = sorted(std::move(out.approvers));
  out.verifiers = sorted(std::move(out.verifiers));
  out.idle = sorted(std::move(out.idle));
  return out;
}

FieldElement FieldElement::operator+(FieldElement other) const {
  const uint128 p = modulus();
  // Both operands are < p, so one conditional subtraction suffices; the
  // wrapped sum is detected by comparison.
  uint128 s = value + other.value;
  if (s < value || s >= p) s -= p;
  return FieldElement{s};
}

std::string FieldElement::hex() const {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out(32, '0');
  uint128 v = value;
  for (int i = 31; i >= 0; --i) {
    out[i] = kDigits[static_cast<int>(v & 0xF)];
    v >>= 4;
  }
  return out;
}

Bytes to_bytes(std::string_view text) { return Bytes(text.begin(), text.end()); }

NodeKey derive_node_key(int node_id, std::uint64_t key_seed) {
  ensure_sodium();
  std::array<std::uint8_t, 24> material{};
  static constexpr char kLabel[] = "sda-node";
  std::copy(kLabel, kLabel + 8, material.begin());
  for (int i = 0; i < 8; ++i) material[8 + i] = static_cast<std::uint8_t>(key_seed >> (8 * i));
  const auto id = static_cast<std::uint64_t>(static_cast<std::int64_t>(node_id));
  for (int i = 0; i < 8; ++i) material[16 + i] = static_cast<std::uint8_t>(id >> (8 * i));
  NodeKey key{};
  crypto_generichash(key.data(), key.size(), material.data(), material.size(), nullptr, 0);
  return key;
}

Digest payload_digest(std::span<const std::uint8_t> payload) {
  ensure_sodium();
  Digest d{};
  crypto_generichash(d.data(), d.size(), payload.data(), payload.size(), nullptr, 0);
  return d;
}

SignatureShare sign(int node_id, const NodeKey& key, std::span<const std::uint8_t> payload) {
  ensure_sodium();
  std::array<std::uint8_t, 16> mac{};
  crypto_generichash(mac.data(), mac.size(), payload.data(), payload.size(), key.data(), key.size());
  uint128 v = 0;
  for (const std::uint8_t b : mac) v = (v << 8) | b;
  if (v >= FieldElement::modulus()) v -= FieldElement::modulus();
  return SignatureShare{node_id, FieldElement{v}, payload_digest(payload)};
}

Bytes flip_byte(std::span<const std::uint8_t> payload, std::size_t index, std::uint8_t mask) {
  if (mask == 0) throw PreconditionError("flip mask must be non-zero");
  if (index >= payload.size()) throw PreconditionError("flip index beyond payload");
  Bytes out(payload.begin(), payload.end());
  out[index] ^= mask;
  return out;
}

ConsensusRound::ConsensusRound(Bytes payload, RoleAssignment assignment, std::uint64_t key_seed)
    : payload_(std::move(payload)), assignment_(std::move(assignment)), key_seed_(key_seed) {
  if (!assignment_.runnable()) {
    throw PreconditionError("assignment is not runnable: needs at least one approver and one verifier");
  }
  std::set<int> approvers(assignment_.approvers.begin(), assignment_.approvers.end());
  for (const int v : assignment_.verifiers) {
    if (approvers.count(v) != 0) {
      throw PreconditionError("node " + std::to_string(v) + " is both approver and verifier");
    }
  }
}

void ConsensusRound::advance(Phase from, Phase to) {
  if (phase_ != from) throw InvariantError("consensus step called out of order");
  phase_ = to;
}

FieldElement ConsensusRound::expected_aggregate(std::span<const int> nodes,
                                                std::span<const std::uint8_t> view) const {
  FieldElement sum;
  for (const int node : nodes) sum += sign(node, key(node), view).value;
  return sum;
}

void ConsensusRound::run_approval(const std::map<int, Behavior>& behaviors) {
  if (phase_ != Phase::Approval) throw InvariantError("consensus step called out of order");
  for (const int node : assignment_.approvers) {
    approver_shares_.push_back(sign(node, key(node), view_of(behavior_of(behaviors, node), payload_)));
    approver_aggregate_ += approver_shares_.back().value;
  }
  advance(Phase::Approval, Phase::Verification);
}

void ConsensusRound::run_verification(const std::map<int, Behavior>& behaviors) {
  if (phase_ != Phase::Verification) throw InvariantError("consensus step called out of order");
  for (const int node : assignment_.verifiers) {
    const auto view = view_of(behavior_of(behaviors, node), payload_);
    FieldElement released;
    for (const auto& share : approver_shares_) released += share.value;
    confirmations_.push_back(released == expected_aggregate(assignment_.approvers, view));
    verifier_shares_.push_back(sign(node, key(node), view));
    verifier_aggregate_ += verifier_shares_.back().value;
  }
  advance(Phase::Verification, Phase::Check);
}

void ConsensusRound::run_check() {
  if (phase_ != Phase::Check) throw InvariantError("consensus step called out of order");
  const bool approvers_ok = approver_aggregate_ == expected_aggregate(assignment_.approvers, payload_);
  const bool verifiers_ok = verifier_aggregate_ == expected_aggregate(assignment_.verifiers, payload_);
  const bool confirmed = std::all_of(confirmations_.begin(), confirmations_.end(), [](bool b) { return b; });
  outcome_ = approvers_ok && verifiers_ok && confirmed ? Outcome::Valid : Outcome::Repeat;
  advance(Phase::Check, Phase::Done);
}

std::string_view ConsensusRound::message() const {
  if (!outcome_) return {};
  return *outcome_ == Outcome::Valid ? kValidMessage : kRepeatMessage;
}

ConsensusRound run_round(Bytes payload, const RoleAssignment& assignment, const ActuatorGraph& graph,
                         const std::map<int, Behavior>& behaviors, std::uint64_t key_seed) {
  const std::set<int> known(graph.node_ids().begin(), graph.node_ids().end());
  for (const auto* group : {&assignment.approvers, &assignment.verifiers}) {
    for (const int id : *group) {
      if (known.count(id) == 0) {
        throw PreconditionError("node " + std::to_string(id) + " is not in the snapshot graph");
      }
    }
  }
  ConsensusRound round(std::move(payload), assignment, key_seed);
  round.run_approval(behaviors);
  round.run_verification(behaviors);
  round.run_check();
  return round;
}

MessageCost message_cost(const RoleAssignment& assignment) {
  MessageCost c;
  c.approval = assignment.approvers.size();
  c.verification = assignment.verifiers.size();
  c.total = c.approval + c.verification;
  return c;
}

nlohmann::json transcript_record(const ConsensusRound& round) {
  const auto& a = round.assignment();
  const MessageCost cost = message_cost(a);
  nlohmann::json j;
  j["timestamp"] = to_iso8601(a.snapshot_time);
  j["strategy"] = to_string(a.strategy);
  j["approvers"] = a.approvers;
  j["verifiers"] = a.verifiers;
  j["idle_count"] = a.idle.size();
  j["outcome"] = round.outcome() ? (*round.outcome() == Outcome::Valid ? "Valid" : "Repeat") : "Pending";
  j["message"] = round.message();
  j["approval_msgs"] = cost.approval;
  j["verification_msgs"] = cost.verification;
  j["total_msgs"] = cost.total;
  return j;
}

}  // namespace sda
