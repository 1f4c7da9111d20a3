// End-to-end checks of the gridshed CLI, run as subprocesses.
// Usage: test_cli <path-to-gridshed> <data-dir>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

namespace {

std::string g_tool;
std::string g_data;
int g_failures = 0;

struct RunResult {
  int exit_code = -1;
  std::string output;  // stdout + stderr
};

RunResult run(const std::string& args) {
  const std::string cmd = g_tool + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  RunResult result;
  if (!pipe) {
    result.output = "popen failed";
    return result;
  }
  char buf[4096];
  while (std::size_t n = fread(buf, 1, sizeof(buf), pipe)) {
    result.output.append(buf, n);
  }
  const int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

void expect(bool ok, const std::string& label, const std::string& detail) {
  if (ok) {
    std::cout << "ok: " << label << "\n";
  } else {
    ++g_failures;
    std::cout << "FAILED: " << label << "\n--- output ---\n" << detail << "--------------\n";
  }
}

bool contains(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

std::string fixture() { return g_data + "/event_fixture.csv"; }

}  // namespace

int main(int argc, char** argv) {
  if (argc < 3) {
    std::cerr << "usage: test_cli <gridshed-binary> <data-dir>\n";
    return 2;
  }
  g_tool = argv[1];
  g_data = argv[2];

  {
    auto r = run("ens --profile " + fixture());
    expect(r.exit_code == 0 && contains(r.output, "ENS = 920") &&
               contains(r.output, "peak shedding = 20."),
           "ens reports the headline figures", r.output);
  }
  {
    auto r = run("ens --profile " + fixture() + " --rho 0.3");
    expect(r.exit_code == 0 && contains(r.output, "ENS = 0 GWh"),
           "30% curtailment removes all shedding", r.output);
  }
  {
    auto r = run("ens --profile " + fixture() +
                 " --residential-share 0.3333333333333333 --residential-fraction 0.6");
    expect(r.exit_code == 0 && contains(r.output, "ENS = 13"),
           "policy route lands on the knee-point energy", r.output);
  }
  {
    auto r = run("cost --energy-gwh 920");
    expect(r.exit_code == 0 && contains(r.output, "$126.04B"),
           "cost of the zero-residual build-out", r.output);
  }
  {
    auto r = run("size --profile " + fixture());
    expect(r.exit_code == 0 && contains(r.output, "required energy = 920") &&
               contains(r.output, "$126"),
           "size reports the zero-residual ratings", r.output);
  }
  {
    auto r = run("dispatch --profile " + fixture() +
                 " --energy-gwh 10 --objective peak_shave");
    expect(r.exit_code == 0 && contains(r.output, "peak shave = 2."),
           "10 GWh shaves a multi-GW peak", r.output);
  }
  {
    // EV fleet CSV round trip through a temp file
    const std::string path = g_data + "/../build_tmp_fleet.csv";
    std::ofstream fleet(path);
    fleet << "name,count,per_vehicle_kwh,availability\n"
          << "cars,3000000,20,1\nshort haul,80000,350,1\nlong haul,200000,600,1\n";
    fleet.close();
    auto r = run("evfleet --fleet " + path);
    expect(r.exit_code == 0 && contains(r.output, "fleet energy = 208 GWh"),
           "evfleet aggregates the projected fleet", r.output);
    std::remove(path.c_str());
  }
  {
    auto r = run("validate --profile " + fixture());
    expect(r.exit_code == 0 && contains(r.output, "PASS baseline_ens") &&
               !contains(r.output, "FAIL"),
           "bundled fixture validates clean", r.output);
  }
  {
    auto r = run("ens --profile /does/not/exist.csv");
    expect(r.exit_code == 1 && contains(r.output, "error:"),
           "missing input file exits 1", r.output);
  }
  {
    auto r = run("ens --no-such-flag");
    expect(r.exit_code == 2, "unknown flag exits 2", r.output);
  }
  {
    auto r = run("--help");
    expect(r.exit_code == 0 && contains(r.output, "ens"), "--help exits 0", r.output);
  }
  {
    auto r = run("ens --profile " + fixture() + " --rho 0.1 --residential-share 0.5");
    expect(r.exit_code == 1 && contains(r.output, "not both"),
           "rho and policy route are mutually exclusive", r.output);
  }
  {
    // sweep output is deterministic byte-for-byte
    const std::string a = g_data + "/../build_tmp_sweep_a.csv";
    const std::string b = g_data + "/../build_tmp_sweep_b.csv";
    const std::string args = "sweep --profile " + fixture() +
                             " --mode ens --rho-from 0 --rho-to 0.3 --rho-step 0.05 "
                             "--energies-gwh 0,135 --out ";
    auto ra = run(args + a);
    auto rb = run(args + b);
    const std::string body_a = slurp(a);
    expect(ra.exit_code == 0 && rb.exit_code == 0 && !body_a.empty() &&
               body_a == slurp(b) && contains(ra.output, "zero ENS at rho = 0.3"),
           "sweep is reproducible and reports the zero crossing", ra.output);
    std::remove(a.c_str());
    std::remove(b.c_str());
  }
  {
    // GRIDSHED_FIXTURE_DIR supplies the default profile
    const std::string cmd =
        "GRIDSHED_FIXTURE_DIR=" + g_data + " " + g_tool + " ens 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    std::string output;
    char buf[4096];
    while (std::size_t n = fread(buf, 1, sizeof(buf), pipe)) output.append(buf, n);
    const int status = pclose(pipe);
    expect(WIFEXITED(status) && WEXITSTATUS(status) == 0 &&
               contains(output, "ENS = 920"),
           "fixture dir env var is honored", output);
  }

  if (g_failures != 0) {
    std::cout << g_failures << " CLI check(s) failed\n";
    return 1;
  }
  std::cout << "all CLI checks passed\n";
  return 0;
}
