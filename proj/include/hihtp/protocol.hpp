#pragma once

// Two-phase secure access simulation.
//
// Phase 1: every active Bob measures its downlink channel, quantizes it into a
// key, encrypts a message and encodes the ciphertext into a sparse codeword.
// Phase 2: all Bobs transmit at once without pilots; Alice runs HiHTP on the
// superposition, recovers every channel and codeword, derives the same keys
// from the recovered uplink channels and decrypts.

#include "hihtp/channel.hpp"
#include "hihtp/keygen.hpp"
#include "hihtp/solver.hpp"

#include "json.hpp"

#include <optional>
#include <vector>

namespace hihtp {

struct ProtocolConfig {
  OperatorDims dims{256, 32, 32, 6};
  Index active_users = 2;  // Bobs that transmit (may be 0)
  Index mu = 2;            // user sparsity assumed by Alice's solver
  Index sigma = 2;
  Index s = 2;
  FieldKind field = FieldKind::complex;
  KeyQuantizer quantizer = KeyQuantizer::for_field(FieldKind::complex);
  double reciprocity_perturbation = 0.0;
  std::optional<double> snr_db;
  std::uint64_t seed = 1;
  SolverConfig solver;

  void validate() const;
};

struct UserOutcome {
  Index user = 0;
  bool recovered = false;       // user support, codeword and residual all correct
  bool key_agreement = false;   // Alice's key equals Bob's
  bool decrypted = false;       // recovered && key_agreement && plaintext matches
  BitString message;
  BitString decrypted_message;
  BitString key_bob;
  BitString key_alice;
  Index bit_errors = 0;
  double channel_rel_error = 1.0;
};

struct ProtocolOutcome {
  ProtocolConfig config;
  std::vector<UserOutcome> users;   // one entry per transmitting Bob, ascending
  std::vector<Index> false_alarms;  // users Alice detected that did not transmit
  Index recovered = 0;
  Index keys_agreed = 0;
  Index decrypted = 0;
  bool success = false;  // every transmitting Bob decrypted and no false alarms
  // solver diagnostics
  int iterations = 0;
  double residual_norm = 0.0;
  StopReason converged_by = StopReason::max_iters;
  bool support_exact = false;
  Index key_bits = 0;
  Index payload_bits = 0;
};

template <Field S>
ProtocolOutcome run_protocol_as(const ProtocolConfig& cfg);

/// Dispatches on cfg.field.
ProtocolOutcome run_protocol(const ProtocolConfig& cfg);

// JSON configuration shared by the command-line tools. Recognized keys:
//   N, N_d, E, N_r, mu, sigma, s, active_users, field ("real"|"complex"), seed,
//   snr_db (null for noiseless), reciprocity_perturbation, max_iters,
//   residual_tol, quantizer {bits, clip}; mu_range/sigma_range/s_range supply
//   mu/sigma/s from their first value when the scalar keys are absent.
OperatorDims dims_from_json(const nlohmann::json& j, OperatorDims defaults);
KeyQuantizer quantizer_from_json(const nlohmann::json& j, FieldKind field);
SolverConfig solver_from_json(const nlohmann::json& j, SolverConfig defaults = {});
ProtocolConfig protocol_config_from_json(const nlohmann::json& j);

nlohmann::json to_json(const ProtocolConfig& cfg);
nlohmann::json to_json(const ProtocolOutcome& outcome);
nlohmann::json to_json(const SuccessReport& report);

/// Reads a JSON document; std::runtime_error naming the path when unreadable.
nlohmann::json load_json_file(const std::string& path);

}  // namespace hihtp
