#include <doctest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ctrlplace/experiments.hpp"

namespace fs = std::filesystem;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string out;
};

// Runs the CLI binary with stderr dropped; stdout captured.
RunResult run_cli(const std::string& args) {
  std::string cmd = std::string(CTRLPLACE_BIN) + " " + args + " 2>/dev/null";
  std::array<char, 4096> buf{};
  RunResult res;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0)
    res.out.append(buf.data(), n);
  int status = pclose(pipe);
  res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return res;
}

std::string data_path(const std::string& name) {
  return std::string(CTRLPLACE_DATA_DIR) + "/" + name;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

TEST_CASE("inspect prints the node and link counts") {
  RunResult r = run_cli("inspect --topology " + data_path("nsfnet.graphml"));
  CHECK(r.exit_code == 0);
  CHECK(r.out == "13 nodes, 15 links\n");
}

TEST_CASE("usage errors exit 1, data errors exit 2") {
  CHECK(run_cli("inspect --no-such-flag").exit_code == 1);
  CHECK(run_cli("bogus-subcommand").exit_code == 1);
  CHECK(run_cli("inspect").exit_code == 1);  // missing required flag
  CHECK(run_cli("inspect --topology /nonexistent.graphml").exit_code == 2);
  CHECK(run_cli("solve --topology " + data_path("nsfnet.graphml") +
                " --gateways no-such-node")
            .exit_code == 2);
}

TEST_CASE("solve output is a pure function of flags") {
  std::string args = "solve --topology " + data_path("nsfnet.graphml") +
                     " --gateway-count 5 --alpha 1 --case 1 --seed 7"
                     " --solver both";
  RunResult a = run_cli(args);
  RunResult b = run_cli(args);
  CHECK(a.exit_code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out.rfind("solver,seed,n_placed,placed,w,", 0) == 0);
  // One header plus two result rows.
  CHECK(std::count(a.out.begin(), a.out.end(), '\n') == 3);

  RunResult c = run_cli(args + " --pretty");
  CHECK(c.out.rfind("solver,seed,", 0) == 0);  // CSV unchanged by --pretty
}

TEST_CASE("experiment writes byte-identical files on reruns") {
  fs::path dir1 = fs::temp_directory_path() / "ctrlplace_cli_exp1";
  fs::path dir2 = fs::temp_directory_path() / "ctrlplace_cli_exp2";
  fs::remove_all(dir1);
  fs::remove_all(dir2);
  std::string base = "experiment --topology " + data_path("nsfnet.graphml") +
                     " --gateway-count 5 --case 1 --repeats 3 --seed 11"
                     " --solver both --out ";
  CHECK(run_cli(base + dir1.string()).exit_code == 0);
  CHECK(run_cli(base + dir2.string()).exit_code == 0);
  CHECK(slurp(dir1 / "trials.csv") == slurp(dir2 / "trials.csv"));
  CHECK(slurp(dir1 / "summary.csv") == slurp(dir2 / "summary.csv"));
  CHECK(slurp(dir1 / "trials.csv")
            .rfind("topology,case,alpha,solver,seed,n_controllers,w,wc,wr,"
                   "avg_reliability,d_avg,elapsed,evaluations,placed",
                   0) == 0);
}

TEST_CASE("experiment accepts a config file") {
  fs::path dir = fs::temp_directory_path() / "ctrlplace_cli_cfg";
  fs::remove_all(dir);
  fs::path cfg = fs::temp_directory_path() / "ctrlplace_cli_cfg.txt";
  {
    std::ofstream out(cfg);
    out << "topology = " << data_path("nsfnet.graphml") << "\n"
        << "gateway_count = 5\ncases = 1\nrepeats = 2\nseed = 3\n"
        << "out_dir = " << dir.string() << "\n";
  }
  RunResult r = run_cli("experiment --config " + cfg.string());
  CHECK(r.exit_code == 0);
  CHECK(fs::exists(dir / "trials.csv"));
  CHECK(fs::exists(dir / "summary.csv"));

  SUBCASE("explicit flags override the file") {
    fs::path dir2 = fs::temp_directory_path() / "ctrlplace_cli_cfg_ov";
    fs::remove_all(dir2);
    RunResult o = run_cli("experiment --config " + cfg.string() +
                          " --repeats 4 --solver greedy --out " +
                          dir2.string());
    CHECK(o.exit_code == 0);
    std::string trials = slurp(dir2 / "trials.csv");
    // 4 repeats x 1 solver: header plus four rows.
    CHECK(std::count(trials.begin(), trials.end(), '\n') == 5);
    CHECK(trials.find("exact") == std::string::npos);
  }
}

TEST_CASE("compare matches the library on the same configuration") {
  std::string args = "compare --topology " + data_path("nsfnet.graphml") +
                     " --gateway-count 5 --case 1 --repeats 2 --seed 7";
  RunResult cli = run_cli(args);
  CHECK(cli.exit_code == 0);

  ctrlplace::ExperimentConfig cfg;
  cfg.topology_path = data_path("nsfnet.graphml");
  cfg.topology_name = "nsfnet";
  cfg.gateway_count = 5;
  cfg.cases = {1};
  cfg.repeats = 2;
  cfg.master_seed = 7;
  std::string want = ctrlplace::gaps_csv(ctrlplace::compare_solvers(cfg), false);
  CHECK(cli.out == want);
}

TEST_CASE("sweep emits rows sorted by alpha") {
  RunResult r = run_cli("sweep --topology " + data_path("nsfnet.graphml") +
                        " --gateway-count 5 --case 1 --repeats 2 --seed 7"
                        " --alpha 10 --alpha 0.1 --alpha 1");
  CHECK(r.exit_code == 0);
  CHECK(r.out.rfind("alpha,mean_n,mean_wc,mean_wr\n", 0) == 0);
  std::istringstream lines(r.out);
  std::string line;
  std::getline(lines, line);  // header
  double prev = -1.0;
  int rows = 0;
  while (std::getline(lines, line)) {
    double alpha = std::stod(line.substr(0, line.find(',')));
    CHECK(alpha > prev);
    prev = alpha;
    ++rows;
  }
  CHECK(rows == 3);
}

TEST_CASE("instance bundles replay bit-exactly through solve") {
  fs::path dir = fs::temp_directory_path() / "ctrlplace_cli_replay";
  fs::remove_all(dir);
  std::string build = "solve --topology " + data_path("nsfnet.graphml") +
                      " --gateway-count 5 --case 2 --seed 5 --solver both"
                      " --export-instance --out " + dir.string();
  RunResult direct = run_cli(build);
  CHECK(direct.exit_code == 0);
  RunResult replayed = run_cli("solve --instance " +
                               (dir / "instance.csv").string() +
                               " --case 2 --seed 5 --solver both");
  CHECK(replayed.exit_code == 0);
  CHECK(replayed.out == direct.out);
}

TEST_CASE("gateway ids can come from a file") {
  fs::path list = fs::temp_directory_path() / "ctrlplace_cli_gw.txt";
  {
    std::ofstream out(list);
    out << "# gateway nodes\n0\n5\n  7  # inline comment\n\n";
  }
  RunResult file_run =
      run_cli("solve --topology " + data_path("nsfnet.graphml") +
              " --gateways @" + list.string() + " --seed 9 --solver exact");
  RunResult inline_run =
      run_cli("solve --topology " + data_path("nsfnet.graphml") +
              " --gateways 0,5,7 --seed 9 --solver exact");
  CHECK(file_run.exit_code == 0);
  CHECK(file_run.out == inline_run.out);
}

TEST_CASE("simulate reports a single-path estimate") {
  RunResult r = run_cli("simulate --topology " + data_path("nsfnet.graphml") +
                        " --gateway-count 5 --case 1 --seed 7"
                        " --samples 2000 --src 0 --dst 12");
  CHECK(r.exit_code == 0);
  CHECK(r.out.rfind("path,samples,analytic,estimate,std_error\n", 0) == 0);
  CHECK(r.out.find("0->12,2000,") != std::string::npos);
}
