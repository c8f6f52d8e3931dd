// lasdvs: key generation, signing, designated verification, simulation,
// size accounting, benchmarking and the statistical test battery.
#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "lasdvs/battery.hpp"
#include "lasdvs/codec.hpp"
#include "lasdvs/sdvs.hpp"
#include "lasdvs/sizes.hpp"

using namespace lasdvs;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitReject = 1;
constexpr int kExitError = 2;

struct CliError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<uint8_t> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CliError("cannot open '" + path + "' for reading");
  std::vector<uint8_t> data((std::istreambuf_iterator<char>(in)),
                            std::istreambuf_iterator<char>());
  if (in.bad()) throw CliError("error while reading '" + path + "'");
  return data;
}

void write_file(const std::string& path, std::span<const uint8_t> data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw CliError("cannot open '" + path + "' for writing");
  out.write(reinterpret_cast<const char*>(data.data()),
            static_cast<std::streamsize>(data.size()));
  if (!out) throw CliError("error while writing '" + path + "'");
}

Params resolve_profile(const std::string& spec) {
  if (spec == "toy" || spec == "desk") return setup(spec);
  const std::string prefix = "custom:";
  if (spec.rfind(prefix, 0) == 0) {
    std::string path = spec.substr(prefix.size());
    auto bytes = read_file(path);
    std::string text(bytes.begin(), bytes.end());
    return setup(parse_profile_kv(text));
  }
  throw CliError("unknown profile '" + spec + "' (expected toy, desk or custom:<file>)");
}

// Seed resolution order: --seed flag, LASDVS_SEED, system entropy.
RandomSource make_rng(const std::string& seed_flag, std::string_view label) {
  if (!seed_flag.empty()) return RandomSource::from_hex(seed_flag, label);
  if (const char* env = std::getenv("LASDVS_SEED")) return RandomSource::from_hex(env, label);
  return RandomSource::from_entropy(label);
}

std::string fp_hex(std::span<const uint8_t> file_bytes) {
  uint64_t fp = codec::fingerprint_bytes(file_bytes);
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fp));
  return buf;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  size_t n = v.size();
  return n == 0 ? 0.0 : (n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]));
}

int cmd_keygen(const std::string& role, const std::string& profile, const std::string& seed,
               const std::string& out_pk, const std::string& out_sk) {
  Params pp = resolve_profile(profile);
  if (role == "signer") {
    auto rng = make_rng(seed, "keygen/signer");
    SignerKeyPair kp = sign_keygen(rng, pp);
    auto pk = codec::encode_signer_public(pp, kp.t);
    auto sk = codec::encode_signer_keypair(pp, kp);
    write_file(out_pk, pk);
    write_file(out_sk, sk);
    std::cout << "signer pk fingerprint: " << fp_hex(pk) << "\n";
  } else if (role == "verifier") {
    auto rng = make_rng(seed, "keygen/verifier");
    VerifierKeyPair kp = ver_keygen(rng, pp);
    auto pk = codec::encode_verifier_public(pp, kp.b0, kp.b1);
    auto sk = codec::encode_verifier_keypair(pp, kp);
    write_file(out_pk, pk);
    write_file(out_sk, sk);
    std::cout << "verifier pk fingerprint: " << fp_hex(pk) << "\n";
  } else {
    throw CliError("role must be 'signer' or 'verifier'");
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(codec::params_fingerprint(pp)));
  std::cout << "params fingerprint: " << buf << "\n";
  return kExitOk;
}

int cmd_sign_or_simulate(bool simulating, const std::string& profile, const std::string& seed,
                         const std::string& sk_path, const std::string& pk_s_path,
                         const std::string& pk_v_path, const std::string& message_path,
                         const std::string& out_path) {
  Params pp = resolve_profile(profile);
  RingElement pk_t = codec::decode_signer_public(pp, read_file(pk_s_path));
  auto [b0, b1] = codec::decode_verifier_public(pp, read_file(pk_v_path));
  auto mu = read_file(message_path);

  Signature sig;
  if (simulating) {
    VerifierKeyPair vk = codec::decode_verifier_keypair(pp, read_file(sk_path));
    if (!(vk.b0.vec == b0.vec && vk.b1.vec == b1.vec))
      throw CliError("verifier secret key does not match the supplied public key");
    auto rng = make_rng(seed, "simulate");
    sig = simulate(rng, pp, vk, pk_t, mu);
  } else {
    SignerKeyPair sk = codec::decode_signer_keypair(pp, read_file(sk_path));
    if (!(sk.t == pk_t))
      throw CliError("signer secret key does not match the supplied public key");
    VerifierKeyPair pk_only;
    pk_only.b0 = b0;
    pk_only.b1 = b1;
    auto rng = make_rng(seed, "sign");
    SignStats st;
    sig = sign(rng, pp, sk, pk_t, pk_only, mu, &st);
    std::cerr << "sign: attempts=" << st.attempts << " (restarts=" << st.attempts - 1
              << ")\n";
  }
  write_file(out_path, codec::encode_signature(pp, sig));
  return kExitOk;
}

int cmd_verify(const std::string& profile, const std::string& sk_v_path,
               const std::string& pk_s_path, const std::string& pk_v_path,
               const std::string& message_path, const std::string& sig_path) {
  Params pp = resolve_profile(profile);
  VerifierKeyPair vk = codec::decode_verifier_keypair(pp, read_file(sk_v_path));
  RingElement pk_t = codec::decode_signer_public(pp, read_file(pk_s_path));
  auto [b0, b1] = codec::decode_verifier_public(pp, read_file(pk_v_path));
  if (!(vk.b0.vec == b0.vec && vk.b1.vec == b1.vec))
    throw CliError("verifier secret key does not match the supplied public key");
  auto mu = read_file(message_path);
  Signature sig = codec::decode_signature(pp, read_file(sig_path));
  if (verify(pp, vk, pk_t, sig, mu)) {
    std::cout << "ACCEPT\n";
    return kExitOk;
  }
  std::cout << "REJECT\n";
  return kExitReject;
}

int cmd_size_report(const std::string& profile, const std::string& seed,
                    const std::string& format) {
  Params pp = resolve_profile(profile);
  auto rng = make_rng(seed, "size-report");
  SizeReport rep = size_report(pp, rng);
  std::cout << (format == "kv" ? rep.to_kv() : rep.to_text());
  return rep.pass() ? kExitOk : kExitReject;
}

int cmd_bench(const std::string& profile, const std::string& seed, uint32_t trials,
              const std::string& format) {
  if (trials < 1) throw CliError("--trials must be at least 1");
  Params pp = resolve_profile(profile);
  auto rng = make_rng(seed, "bench");
  using Clock = std::chrono::steady_clock;
  auto ms_since = [](Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
  };

  std::vector<double> t_keygen_s, t_keygen_v, t_sign, t_verify, t_simulate;
  uint64_t attempts_total = 0, signs_total = 0;
  std::vector<uint8_t> mu = {'b', 'e', 'n', 'c', 'h'};
  for (uint32_t i = 0; i < trials; i++) {
    auto t0 = Clock::now();
    SignerKeyPair sk = sign_keygen(rng, pp);
    t_keygen_s.push_back(ms_since(t0));

    t0 = Clock::now();
    VerifierKeyPair vk = ver_keygen(rng, pp);
    t_keygen_v.push_back(ms_since(t0));

    mu.push_back(uint8_t(i));
    t0 = Clock::now();
    SignStats st;
    Signature sig = sign(rng, pp, sk, sk.t, vk, mu, &st);
    t_sign.push_back(ms_since(t0));
    attempts_total += st.attempts;
    signs_total++;

    t0 = Clock::now();
    bool ok = verify(pp, vk, sk.t, sig, mu);
    t_verify.push_back(ms_since(t0));
    if (!ok) throw CliError("bench: honest signature failed to verify");

    t0 = Clock::now();
    Signature sim = simulate(rng, pp, vk, sk.t, mu);
    t_simulate.push_back(ms_since(t0));
    if (!verify(pp, vk, sk.t, sim, mu))
      throw CliError("bench: simulated signature failed to verify");
  }
  double acc_rate = double(signs_total) / double(attempts_total);
  SizeReport rep = size_report(pp, rng);

  const std::pair<const char*, std::vector<double>*> rows[] = {
      {"keygen_signer", &t_keygen_s},
      {"keygen_verifier", &t_keygen_v},
      {"sign", &t_sign},
      {"verify", &t_verify},
      {"simulate", &t_simulate}};
  if (format == "kv") {
    for (const auto& [name, times] : rows)
      std::cout << "median_ms_" << name << "=" << median(*times) << "\n";
    std::cout << "trials=" << trials << "\n";
    std::cout << "acceptance_rate=" << acc_rate << "\n";
    std::cout << "expected_acceptance_rate=" << 1.0 / pp.M << "\n";
    std::cout << rep.to_kv();
  } else {
    std::cout << "bench: profile " << pp.profile_name << ", " << trials << " trials\n";
    for (const auto& [name, times] : rows)
      std::cout << "  " << name << ": median " << median(*times) << " ms\n";
    std::cout << "  rejection: acceptance rate " << acc_rate << " (expected "
              << 1.0 / pp.M << ")\n";
    std::cout << rep.to_text();
  }
  return rep.pass() ? kExitOk : kExitReject;
}

int cmd_stats(const std::string& profile, const std::string& seed, uint64_t samples,
              bool negative_control, const std::string& format) {
  if (samples < 10000) throw CliError("--samples must be at least 10^4");
  Params pp = resolve_profile(profile);
  auto rng = make_rng(seed, "stats");
  auto results = battery::run_battery(pp, rng, samples, negative_control);
  bool all_pass = true;
  for (const auto& r : results) {
    all_pass = all_pass && r.pass;
    if (format == "kv") {
      std::cout << "test_" << r.name << "_pass=" << (r.pass ? 1 : 0) << "\n"
                << "test_" << r.name << "_p=" << r.p_value << "\n";
    } else {
      std::cout << battery::format_result(r) << "\n";
    }
  }
  if (format == "kv") std::cout << "battery_pass=" << (all_pass ? 1 : 0) << "\n";
  else std::cout << (all_pass ? "battery: all tests passed" : "battery: FAILURES") << "\n";
  return all_pass ? kExitOk : kExitReject;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LaSDVS strong designated-verifier signatures"};
  app.require_subcommand(1);

  std::string profile, seed, role, out_pk, out_sk, sk_path, pk_s, pk_v, message, sig_path,
      out_path, format = "text";
  uint32_t trials = 100;
  uint64_t samples = 100000;
  bool negative_control = false;

  auto add_profile = [&](CLI::App* cmd) {
    cmd->add_option("--profile", profile, "toy | desk | custom:<kv-file>")->required();
  };
  auto add_seed = [&](CLI::App* cmd) {
    cmd->add_option("--seed", seed, "64 hex chars; overrides LASDVS_SEED");
  };
  auto add_format = [&](CLI::App* cmd) {
    cmd->add_option("--format", format, "text | kv")
        ->check(CLI::IsMember({"text", "kv"}));
  };

  auto* keygen = app.add_subcommand("keygen", "generate a key pair");
  add_profile(keygen);
  add_seed(keygen);
  keygen->add_option("--role", role, "signer | verifier")->required();
  keygen->add_option("--out-pk", out_pk, "public key output path")->required();
  keygen->add_option("--out-sk", out_sk, "secret key output path")->required();

  auto* sign_cmd = app.add_subcommand("sign", "sign a message for a designated verifier");
  add_profile(sign_cmd);
  add_seed(sign_cmd);
  sign_cmd->add_option("--sk-s", sk_path, "signer secret key")->required();
  sign_cmd->add_option("--pk-s", pk_s, "signer public key")->required();
  sign_cmd->add_option("--pk-v", pk_v, "verifier public key")->required();
  sign_cmd->add_option("--message", message, "message file (raw bytes)")->required();
  sign_cmd->add_option("--out", out_path, "signature output path")->required();

  auto* simulate_cmd = app.add_subcommand("simulate", "verifier-side signature simulation");
  add_profile(simulate_cmd);
  add_seed(simulate_cmd);
  simulate_cmd->add_option("--sk-v", sk_path, "verifier secret key")->required();
  simulate_cmd->add_option("--pk-s", pk_s, "signer public key")->required();
  simulate_cmd->add_option("--pk-v", pk_v, "verifier public key")->required();
  simulate_cmd->add_option("--message", message, "message file (raw bytes)")->required();
  simulate_cmd->add_option("--out", out_path, "signature output path")->required();

  auto* verify_cmd = app.add_subcommand("verify", "verify with the designated verifier key");
  add_profile(verify_cmd);
  verify_cmd->add_option("--sk-v", sk_path, "verifier secret key")->required();
  verify_cmd->add_option("--pk-s", pk_s, "signer public key")->required();
  verify_cmd->add_option("--pk-v", pk_v, "verifier public key")->required();
  verify_cmd->add_option("--message", message, "message file (raw bytes)")->required();
  verify_cmd->add_option("--sig", sig_path, "signature file")->required();

  auto* size_cmd = app.add_subcommand("size-report", "size formulas vs measured encodings");
  add_profile(size_cmd);
  add_seed(size_cmd);
  add_format(size_cmd);

  auto* bench_cmd = app.add_subcommand("bench", "wall-time and size benchmark");
  add_profile(bench_cmd);
  add_seed(bench_cmd);
  add_format(bench_cmd);
  bench_cmd->add_option("--trials", trials, "number of trials");

  auto* stats_cmd = app.add_subcommand("stats", "statistical test battery");
  add_profile(stats_cmd);
  add_seed(stats_cmd);
  add_format(stats_cmd);
  stats_cmd->add_option("--samples", samples, "samples per test (min 10^4)");
  stats_cmd->add_flag("--negative-control", negative_control,
                      "mis-parameterize Sign and require the battery to notice");

  CLI11_PARSE(app, argc, argv);

  try {
    if (keygen->parsed()) return cmd_keygen(role, profile, seed, out_pk, out_sk);
    if (sign_cmd->parsed())
      return cmd_sign_or_simulate(false, profile, seed, sk_path, pk_s, pk_v, message, out_path);
    if (simulate_cmd->parsed())
      return cmd_sign_or_simulate(true, profile, seed, sk_path, pk_s, pk_v, message, out_path);
    if (verify_cmd->parsed())
      return cmd_verify(profile, sk_path, pk_s, pk_v, message, sig_path);
    if (size_cmd->parsed()) return cmd_size_report(profile, seed, format);
    if (bench_cmd->parsed()) return cmd_bench(profile, seed, trials, format);
    if (stats_cmd->parsed())
      return cmd_stats(profile, seed, samples, negative_control, format);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
