#include "hihtp/protocol.hpp"

#include <algorithm>
#include <fstream>

namespace hihtp {

void ProtocolConfig::validate() const {
  if (active_users < 0 || active_users > dims.users)
    throw std::invalid_argument("protocol: active_users must lie in [0, N_r]");
  SparsityProfile{s, sigma, mu, dims.layout()}.validate();
  quantizer.validate();
  solver.validate();
  if (reciprocity_perturbation < 0.0) throw std::invalid_argument("protocol: reciprocity_perturbation must be >= 0");
}

namespace {

Index hamming(const BitString& a, const BitString& b) {
  if (a.size() != b.size()) return static_cast<Index>(std::max(a.size(), b.size()));
  Index n = 0;
  for (std::size_t i = 0; i < a.size(); ++i) n += a[i] != b[i];
  return n;
}

}  // namespace

template <Field S>
ProtocolOutcome run_protocol_as(const ProtocolConfig& cfg) {
  cfg.validate();
  const auto& dims = cfg.dims;
  const SparsityProfile profile{cfg.s, cfg.sigma, cfg.mu, dims.layout()};
  const auto op = MeasurementOperator<S>::random(dims, cfg.seed);
  const std::size_t payload = payload_bits(dims.entries, cfg.s);

  ProtocolOutcome out;
  out.config = cfg;
  out.payload_bits = static_cast<Index>(payload);
  out.key_bits = cfg.quantizer.key_length(cfg.sigma, components_v<S>);

  // Phase 1: each transmitting Bob keys and encrypts from its downlink measurement.
  Rng activity(split_seed(cfg.seed, {stream::activity}));
  const auto active = activity.choose(dims.users, cfg.active_users);
  std::vector<UserInstance<S>> users;
  for (Index p = 0; p < dims.users; ++p) {
    UserInstance<S> u;
    u.user = p;
    u.active = std::binary_search(active.begin(), active.end(), p);
    u.h = Signal<S>::Zero(dims.taps);
    u.b = Signal<S>::Zero(dims.entries);
    if (u.active) {
      const auto tag = static_cast<std::uint64_t>(p);
      Rng channel(split_seed(cfg.seed, {stream::channel, tag}));
      Rng reciprocity(split_seed(cfg.seed, {stream::reciprocity, tag}));
      Rng message(split_seed(cfg.seed, {stream::message, tag}));
      u.h = draw_channel<S>(dims.taps, cfg.sigma, channel);
      const auto pair = ReciprocalChannelPair<S>::draw(u.h, cfg.reciprocity_perturbation, reciprocity);
      u.key_bits = derive_key(pair.h_down, cfg.quantizer, Side::bob);
      u.message_index = uniform_below(BigInt(1) << static_cast<unsigned>(payload), message);
      u.message_bits = to_bits(u.message_index, payload);
      u.ciphertext_bits = encrypt(u.message_bits, u.key_bits);
      u.b = encode_signal<S>(from_bits(u.ciphertext_bits), dims.entries, cfg.s);
    }
    users.push_back(std::move(u));
  }

  // Phase 2: uncoordinated uplink, blind recovery, key derivation, decryption.
  Rng noise(split_seed(cfg.seed, {stream::noise}));
  const Signal<S> y = synthesize_uplink(users, op, cfg.snr_db, noise);
  const auto result = hihtp(op, y, profile, cfg.solver);
  const HierSupport truth = HierSupport::of_nonzeros(lift(users, op.layout()));
  const auto factors = recover_factors(result.z_hat, result.support.active_users());
  const bool residual_ok = result.residual_norm < cfg.solver.residual_tol;

  out.iterations = result.iterations;
  out.residual_norm = result.residual_norm;
  out.converged_by = result.converged_by;
  out.support_exact = result.support == truth;

  for (const auto& u : users) {
    if (!u.active) continue;
    UserOutcome o;
    o.user = u.user;
    o.message = u.message_bits;
    o.key_bob = u.key_bits;
    const auto f = std::find_if(factors.begin(), factors.end(), [&](const auto& x) { return x.user == u.user; });
    if (f != factors.end()) {
      o.key_alice = derive_key(f->h, cfg.quantizer, Side::alice);
      o.channel_rel_error = (f->h - u.h).norm() / u.h.norm();
      o.recovered = residual_ok && result.support.user_part(u.user) == truth.user_part(u.user) && f->b == u.b;
      try {
        const BigInt index = decode_signal(f->b, cfg.s);
        if (index < (BigInt(1) << static_cast<unsigned>(payload)))
          o.decrypted_message = decrypt(to_bits(index, payload), o.key_alice);
      } catch (const DecodeError&) {
      }
    }
    o.key_agreement = !o.key_alice.empty() && o.key_alice == o.key_bob;
    o.bit_errors = hamming(o.decrypted_message, o.message);
    o.decrypted = o.recovered && o.key_agreement && o.decrypted_message == o.message;
    out.recovered += o.recovered;
    out.keys_agreed += o.key_agreement;
    out.decrypted += o.decrypted;
    out.users.push_back(std::move(o));
  }
  for (const auto& f : factors)
    if (!users[static_cast<std::size_t>(f.user)].active) out.false_alarms.push_back(f.user);
  out.success = out.decrypted == cfg.active_users && out.false_alarms.empty();
  return out;
}

ProtocolOutcome run_protocol(const ProtocolConfig& cfg) {
  return cfg.field == FieldKind::real ? run_protocol_as<double>(cfg) : run_protocol_as<Complex>(cfg);
}

template ProtocolOutcome run_protocol_as<double>(const ProtocolConfig&);
template ProtocolOutcome run_protocol_as<Complex>(const ProtocolConfig&);

// ---- JSON ----

namespace {

Index first_of_range(const nlohmann::json& j, const char* range_key, const char* key, Index fallback) {
  if (j.contains(key)) return j.at(key).get<Index>();
  if (j.contains(range_key)) {
    const auto& r = j.at(range_key);
    if (r.is_array() && !r.empty()) return r.front().get<Index>();
    if (r.is_number_integer()) return r.get<Index>();
    if (r.is_object()) return r.at("start").get<Index>();
  }
  return fallback;
}

}  // namespace

OperatorDims dims_from_json(const nlohmann::json& j, OperatorDims d) {
  d.measurements = j.value("N", d.measurements);
  d.taps = j.value("N_d", d.taps);
  d.entries = j.value("E", d.entries);
  d.users = j.value("N_r", d.users);
  return d;
}

KeyQuantizer quantizer_from_json(const nlohmann::json& j, FieldKind field) {
  KeyQuantizer q = KeyQuantizer::for_field(field);
  if (j.contains("quantizer") && !j.at("quantizer").is_null()) {
    const auto& jq = j.at("quantizer");
    q.bits = jq.value("bits", q.bits);
    if (jq.contains("clip") && !jq.at("clip").is_null()) q.clip = jq.at("clip").get<double>();
  }
  return q;
}

SolverConfig solver_from_json(const nlohmann::json& j, SolverConfig cfg) {
  cfg.max_iters = j.value("max_iters", cfg.max_iters);
  cfg.residual_tol = j.value("residual_tol", cfg.residual_tol);
  cfg.ls_tol = j.value("ls_tol", cfg.ls_tol);
  if (j.contains("block_score")) {
    const auto name = j.at("block_score").get<std::string>();
    if (name == "energy")
      cfg.block_score = BlockScore::energy;
    else if (name == "magnitude_sum")
      cfg.block_score = BlockScore::magnitude_sum;
    else
      throw std::invalid_argument("unknown block_score '" + name + "'");
  }
  return cfg;
}

ProtocolConfig protocol_config_from_json(const nlohmann::json& j) {
  ProtocolConfig c;
  c.dims = dims_from_json(j, c.dims);
  c.field = parse_field(j.value("field", std::string(to_string(c.field))));
  c.mu = first_of_range(j, "mu_range", "mu", c.mu);
  c.sigma = first_of_range(j, "sigma_range", "sigma", c.sigma);
  c.s = first_of_range(j, "s_range", "s", c.s);
  c.active_users = j.value("active_users", c.mu);
  c.quantizer = quantizer_from_json(j, c.field);
  c.reciprocity_perturbation = j.value("reciprocity_perturbation", 0.0);
  if (j.contains("snr_db") && !j.at("snr_db").is_null()) c.snr_db = j.at("snr_db").get<double>();
  c.seed = j.value("seed", c.seed);
  c.solver = solver_from_json(j);
  c.validate();
  return c;
}

nlohmann::json to_json(const ProtocolConfig& c) {
  return {{"N", c.dims.measurements},
          {"N_d", c.dims.taps},
          {"E", c.dims.entries},
          {"N_r", c.dims.users},
          {"active_users", c.active_users},
          {"mu", c.mu},
          {"sigma", c.sigma},
          {"s", c.s},
          {"field", to_string(c.field)},
          {"quantizer", {{"bits", c.quantizer.bits}, {"clip", c.quantizer.clip}}},
          {"reciprocity_perturbation", c.reciprocity_perturbation},
          {"snr_db", c.snr_db ? nlohmann::json(*c.snr_db) : nlohmann::json(nullptr)},
          {"seed", c.seed},
          {"max_iters", c.solver.max_iters},
          {"residual_tol", c.solver.residual_tol}};
}

nlohmann::json to_json(const ProtocolOutcome& o) {
  nlohmann::json users = nlohmann::json::array();
  for (const auto& u : o.users)
    users.push_back({{"user", u.user},
                     {"recovered", u.recovered},
                     {"key_agreement", u.key_agreement},
                     {"decrypted", u.decrypted},
                     {"bit_errors", u.bit_errors},
                     {"channel_rel_error", u.channel_rel_error},
                     {"message", to_string(u.message)},
                     {"decrypted_message", to_string(u.decrypted_message)},
                     {"key_bob", to_string(u.key_bob)},
                     {"key_alice", to_string(u.key_alice)}});
  return {{"schema", "hihtp.protocol_outcome.v1"},
          {"config", to_json(o.config)},
          {"success", o.success},
          {"counts",
           {{"transmitting", static_cast<Index>(o.users.size())},
            {"recovered", o.recovered},
            {"keys_agreed", o.keys_agreed},
            {"decrypted", o.decrypted},
            {"false_alarms", static_cast<Index>(o.false_alarms.size())}}},
          {"key_bits", o.key_bits},
          {"payload_bits", o.payload_bits},
          {"solver",
           {{"iterations", o.iterations},
            {"residual_norm", o.residual_norm},
            {"converged_by", to_string(o.converged_by)},
            {"support_exact", o.support_exact}}},
          {"users", users},
          {"false_alarms", o.false_alarms}};
}

nlohmann::json to_json(const SuccessReport& r) {
  nlohmann::json users = nlohmann::json::array();
  for (const auto& u : r.users)
    users.push_back({{"user", u.user},
                     {"detected", u.detected},
                     {"b_errors", u.b_errors},
                     {"message_bit_errors", u.message_bit_errors},
                     {"channel_rel_error", u.channel_rel_error}});
  return {{"success", r.success},
          {"support_exact", r.support_exact},
          {"activity_exact", r.activity_exact},
          {"residual_ok", r.residual_ok},
          {"residual_norm", r.residual_norm},
          {"iterations", r.iterations},
          {"users", users}};
}

nlohmann::json load_json_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot read config file '" + path + "'");
  try {
    return nlohmann::json::parse(is, nullptr, true, true);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error("config file '" + path + "' is not valid JSON: " + e.what());
  }
}

}  // namespace hihtp
