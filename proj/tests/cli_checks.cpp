// Drives the built CLI binary end to end: exit codes, determinism, file
// handling. argv[1] is the path to the binary.
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "lasdvs/codec.hpp"
#include "lasdvs/sizes.hpp"

namespace fs = std::filesystem;

namespace {

std::string g_cli;
fs::path g_dir;
int g_failures = 0;

struct RunResult {
  int exit_code;
  std::string out;
};

RunResult run(const std::string& args) {
  fs::path out_file = g_dir / "cmd_output.txt";
  std::string cmd = g_cli + " " + args + " >" + out_file.string() + " 2>&1";
  int rc = std::system(cmd.c_str());
  int code = -1;
  if (rc != -1) code = WEXITSTATUS(rc);
  std::ifstream in(out_file);
  std::stringstream ss;
  ss << in.rdbuf();
  return {code, ss.str()};
}

std::vector<uint8_t> slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::vector<uint8_t>((std::istreambuf_iterator<char>(in)),
                              std::istreambuf_iterator<char>());
}

void check(bool cond, const std::string& what, const std::string& context = "") {
  if (cond) {
    std::printf("ok: %s\n", what.c_str());
  } else {
    g_failures++;
    std::printf("FAIL: %s\n", what.c_str());
    if (!context.empty()) std::printf("---- output ----\n%s\n----------------\n", context.c_str());
  }
}

const char* kSeedA = "00112233445566778899aabbccddeeff00112233445566778899aabbccddeeff";
const char* kSeedB = "ffeeddccbbaa99887766554433221100ffeeddccbbaa99887766554433221100";
const char* kSeedC = "1111111111111111111111111111111111111111111111111111111111111111";

std::string p(const char* name) { return (g_dir / name).string(); }

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: cli_checks <path-to-cli>\n");
    return 2;
  }
  g_cli = argv[1];
  g_dir = fs::temp_directory_path() / "lasdvs_cli_checks";
  fs::remove_all(g_dir);
  fs::create_directories(g_dir);

  // keygen determinism: same seed, byte-identical files
  {
    auto r1 = run("keygen --profile toy --role signer --seed " + std::string(kSeedA) +
                  " --out-pk " + p("s1.pk") + " --out-sk " + p("s1.sk"));
    auto r2 = run("keygen --profile toy --role signer --seed " + std::string(kSeedA) +
                  " --out-pk " + p("s2.pk") + " --out-sk " + p("s2.sk"));
    check(r1.exit_code == 0 && r2.exit_code == 0, "signer keygen exits 0", r1.out);
    check(slurp(p("s1.pk")) == slurp(p("s2.pk")) && slurp(p("s1.sk")) == slurp(p("s2.sk")),
          "seeded signer keygen is byte-identical across runs");
    check(r1.out.find("fingerprint") != std::string::npos, "keygen prints fingerprints", r1.out);
  }
  {
    auto r1 = run("keygen --profile toy --role verifier --seed " + std::string(kSeedB) +
                  " --out-pk " + p("v1.pk") + " --out-sk " + p("v1.sk"));
    auto r2 = run("keygen --profile toy --role verifier --seed " + std::string(kSeedB) +
                  " --out-pk " + p("v2.pk") + " --out-sk " + p("v2.sk"));
    check(r1.exit_code == 0 && r2.exit_code == 0, "verifier keygen exits 0", r1.out);
    check(slurp(p("v1.pk")) == slurp(p("v2.pk")) && slurp(p("v1.sk")) == slurp(p("v2.sk")),
          "seeded verifier keygen is byte-identical across runs");
  }

  // verifier file sizes agree with the size report's accounting
  {
    lasdvs::Params pp = lasdvs::setup("toy");
    size_t elem = (size_t(pp.n) * pp.k + 7) / 8;
    size_t pk_expect = lasdvs::codec::kHeaderBytes + 2 * pp.lk() * elem;
    size_t sk_expect = pk_expect + 2 * (16 + size_t(pp.l) * pp.k * elem + elem);
    check(fs::file_size(p("v1.pk")) == pk_expect, "verifier pk file size matches accounting");
    check(fs::file_size(p("v1.sk")) == sk_expect, "verifier sk file size matches accounting");
  }

  // message
  {
    std::ofstream msg(p("msg.bin"), std::ios::binary);
    msg << "designated verifier message";
  }

  // sign -> verify ACCEPT
  {
    auto rs = run("sign --profile toy --seed " + std::string(kSeedC) + " --sk-s " + p("s1.sk") +
                  " --pk-s " + p("s1.pk") + " --pk-v " + p("v1.pk") + " --message " +
                  p("msg.bin") + " --out " + p("m.sig"));
    check(rs.exit_code == 0, "sign exits 0", rs.out);
    auto rv = run("verify --profile toy --sk-v " + p("v1.sk") + " --pk-s " + p("s1.pk") +
                  " --pk-v " + p("v1.pk") + " --message " + p("msg.bin") + " --sig " + p("m.sig"));
    check(rv.exit_code == 0 && rv.out.find("ACCEPT") != std::string::npos,
          "verify accepts an honest signature with exit 0", rv.out);
  }

  // sign determinism under a fixed seed
  {
    auto rs = run("sign --profile toy --seed " + std::string(kSeedC) + " --sk-s " + p("s1.sk") +
                  " --pk-s " + p("s1.pk") + " --pk-v " + p("v1.pk") + " --message " +
                  p("msg.bin") + " --out " + p("m2.sig"));
    check(rs.exit_code == 0 && slurp(p("m.sig")) == slurp(p("m2.sig")),
          "seeded signing is byte-identical across runs", rs.out);
  }

  // simulate -> verify ACCEPT
  {
    auto rs = run("simulate --profile toy --seed " + std::string(kSeedC) + " --sk-v " +
                  p("v1.sk") + " --pk-s " + p("s1.pk") + " --pk-v " + p("v1.pk") +
                  " --message " + p("msg.bin") + " --out " + p("sim.sig"));
    check(rs.exit_code == 0, "simulate exits 0", rs.out);
    auto rv = run("verify --profile toy --sk-v " + p("v1.sk") + " --pk-s " + p("s1.pk") +
                  " --pk-v " + p("v1.pk") + " --message " + p("msg.bin") + " --sig " +
                  p("sim.sig"));
    check(rv.exit_code == 0 && rv.out.find("ACCEPT") != std::string::npos,
          "verify accepts a simulated signature", rv.out);
  }

  // tampered message: REJECT with exit 1
  {
    std::ofstream msg(p("msg2.bin"), std::ios::binary);
    msg << "designated verifier messagE";
    auto rv = run("verify --profile toy --sk-v " + p("v1.sk") + " --pk-s " + p("s1.pk") +
                  " --pk-v " + p("v1.pk") + " --message " + p("msg2.bin") + " --sig " +
                  p("m.sig"));
    check(rv.exit_code == 1 && rv.out.find("REJECT") != std::string::npos,
          "verify rejects a tampered message with exit 1", rv.out);
  }

  // truncated signature: exit 2, distinct from REJECT
  {
    auto sig = slurp(p("m.sig"));
    sig.resize(sig.size() - 1);
    std::ofstream out(p("trunc.sig"), std::ios::binary);
    out.write(reinterpret_cast<const char*>(sig.data()), std::streamsize(sig.size()));
    out.close();
    auto rv = run("verify --profile toy --sk-v " + p("v1.sk") + " --pk-s " + p("s1.pk") +
                  " --pk-v " + p("v1.pk") + " --message " + p("msg.bin") + " --sig " +
                  p("trunc.sig"));
    check(rv.exit_code == 2, "truncated signature file exits 2", rv.out);
  }

  // cross-profile mixing: exit 2 with a params mismatch
  {
    auto r1 = run("keygen --profile desk --role signer --seed " + std::string(kSeedA) +
                  " --out-pk " + p("desk.pk") + " --out-sk " + p("desk.sk"));
    check(r1.exit_code == 0, "desk signer keygen exits 0", r1.out);
    auto rs = run("sign --profile toy --sk-s " + p("desk.sk") + " --pk-s " + p("desk.pk") +
                  " --pk-v " + p("v1.pk") + " --message " + p("msg.bin") + " --out " +
                  p("never.sig"));
    check(rs.exit_code == 2, "mixing profiles is a params-mismatch error with exit 2", rs.out);
  }

  // missing output directory: nonzero exit
  {
    auto r1 = run("keygen --profile toy --role signer --seed " + std::string(kSeedA) +
                  " --out-pk " + (g_dir / "no_such_dir" / "x.pk").string() + " --out-sk " +
                  p("x.sk"));
    check(r1.exit_code != 0, "missing output directory fails with nonzero exit", r1.out);
  }

  // size-report: kv format, passing
  {
    auto r1 = run("size-report --profile toy --seed " + std::string(kSeedA) + " --format kv");
    check(r1.exit_code == 0 && r1.out.find("size_report_pass=1") != std::string::npos,
          "size-report passes in kv format", r1.out);
  }

  // bench smoke test
  {
    auto r1 = run("bench --profile toy --trials 5 --seed " + std::string(kSeedA) +
                  " --format kv");
    check(r1.exit_code == 0 && r1.out.find("median_ms_sign=") != std::string::npos &&
              r1.out.find("acceptance_rate=") != std::string::npos,
          "bench runs and emits machine-readable output", r1.out);
  }

  // stats battery: minimum sample floor, smoke run, determinism, negative control
  {
    auto r0 = run("stats --profile toy --samples 100 --seed " + std::string(kSeedA));
    check(r0.exit_code == 2, "stats rejects samples below 10^4", r0.out);

    auto r1 = run("stats --profile toy --samples 10000 --seed " + std::string(kSeedA) +
                  " --format kv");
    check(r1.exit_code == 0 && r1.out.find("battery_pass=1") != std::string::npos,
          "stats battery passes at the toy profile", r1.out);

    auto r2 = run("stats --profile toy --samples 10000 --seed " + std::string(kSeedA) +
                  " --format kv");
    check(r1.out == r2.out, "seeded stats reports are identical across runs");

    auto r3 = run("stats --profile toy --samples 10000 --seed " + std::string(kSeedA) +
                  " --negative-control --format kv");
    check(r3.exit_code == 0 &&
              r3.out.find("test_negative_control_detects_mismatch_pass=1") != std::string::npos,
          "negative control detects the mis-parameterized signer", r3.out);
  }

  // unknown profile: exit 2
  {
    auto r1 = run("verify --profile nope --sk-v " + p("v1.sk") + " --pk-s " + p("s1.pk") +
                  " --pk-v " + p("v1.pk") + " --message " + p("msg.bin") + " --sig " +
                  p("m.sig"));
    check(r1.exit_code == 2, "unknown profile exits 2", r1.out);
  }

  std::printf("%s: %d failure(s)\n", g_failures == 0 ? "ALL OK" : "FAILURES", g_failures);
  return g_failures == 0 ? 0 : 1;
}
