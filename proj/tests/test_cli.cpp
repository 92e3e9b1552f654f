#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "repgame/spec_io.hpp"

using namespace repgame;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string output;
};

// Runs the CLI binary, capturing stdout and stderr together.
RunResult run_cli(const std::string& args) {
  RunResult r;
  std::string cmd = std::string(CLI_PATH) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf;
  while (std::size_t n = std::fread(buf.data(), 1, buf.size(), pipe))
    r.output.append(buf.data(), n);
  int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string spec(const std::string& name) {
  return std::string(SPEC_DIR) + "/" + name;
}

std::filesystem::path write_temp(const std::string& name,
                                 const std::string& body) {
  auto p = std::filesystem::temp_directory_path() / name;
  std::ofstream out(p);
  out << body;
  return p;
}

}  // namespace

TEST_CASE("solve on the bundled product-choice spec") {
  auto r = run_cli("solve --spec " + spec("product_choice.json"));
  REQUIRE(r.exit_code == 0);
  json j = json::parse(r.output);
  CHECK(j["stackelberg"]["expected"].get<double>() == Catch::Approx(0.5));
  CHECK(j["stackelberg"]["v1_star"][0].get<double>() == Catch::Approx(1.0));
  CHECK(j["stackelberg"]["v1_star"][1].get<double>() ==
        Catch::Approx(0.0).margin(1e-12));
  CHECK(j["minmax"]["expected"].get<double>() == Catch::Approx(0.0).margin(1e-12));
  CHECK(j["v1_prime"]["value"].get<double>() == Catch::Approx(0.0).margin(1e-12));
  CHECK(j["v1_prime"]["a_prime"] == json::array({"L"}));
  CHECK(j["lambda_bar"].get<double>() == Catch::Approx(0.5));
}

TEST_CASE("bound report matches the known instance constants") {
  auto r = run_cli("bound --spec " + spec("product_choice.json") +
                   " --delta 0.99999");
  REQUIRE(r.exit_code == 0);
  json j = json::parse(r.output);
  CHECK(j["lambda_bar"].get<double>() == Catch::Approx(0.5));
  CHECK(j["xi_star"].get<double>() == Catch::Approx(0.995));
  CHECK(j["d_star"].get<double>() == Catch::Approx(-std::log(0.995)));
  CHECK(j["t_bar"].get<long>() == 460);
  CHECK(j["bound_3_6"].get<double>() == Catch::Approx(0.414258155292));
}

TEST_CASE("bad probabilities exit 2 naming the section") {
  auto p = write_temp("bad_prob.json", R"({
    "game": {"theta": ["g"], "a": ["H"], "b": ["T"],
             "u1": [[[1]]], "u2": [[1]]},
    "environment": {"entries": [{"theta": "g", "subset": ["H"], "p": 0.9}]},
    "signals": {"y": ["0", "1"], "f": [[[0, 1]]]}
  })");
  auto r = run_cli("solve --spec " + p.string());
  CHECK(r.exit_code == 2);
  CHECK(r.output.find("nvironment") != std::string::npos);
}

TEST_CASE("unknown keys exit 2 naming the key") {
  auto p = write_temp("bad_key.json", R"({
    "game": {"theta": ["g"], "a": ["H"], "b": ["T"],
             "u1": [[[1]]], "u2": [[1]], "bogus": 1},
    "environment": {"entries": [{"theta": "g", "subset": ["H"], "p": 1.0}]},
    "signals": {"y": ["0", "1"], "f": [[[0, 1]]]}
  })");
  auto r = run_cli("solve --spec " + p.string());
  CHECK(r.exit_code == 2);
  CHECK(r.output.find("bogus") != std::string::npos);
}

TEST_CASE("single-action game yields a valid degenerate report") {
  auto p = write_temp("one_action.json", R"({
    "game": {"theta": ["g"], "a": ["H"], "b": ["T", "N"],
             "u1": [[[1, 0]]], "u2": [[1, 0]]},
    "environment": {"entries": [{"theta": "g", "subset": ["H"], "p": 1.0}]},
    "signals": {"y": ["0", "1"], "f": [[[0, 1]]]}
  })");
  auto r = run_cli("solve --spec " + p.string());
  REQUIRE(r.exit_code == 0);
  json j = json::parse(r.output);
  CHECK(j["stackelberg"]["a_star"][0] == "H");
}

TEST_CASE("simulate is byte-identical for a fixed seed") {
  std::string args = "simulate --spec " + spec("product_choice.json") +
                     " --seeds 2 --seed 42";
  auto r1 = run_cli(args);
  auto r2 = run_cli(args);
  REQUIRE(r1.exit_code == 0);
  CHECK(r1.output == r2.output);
  auto r3 = run_cli("simulate --spec " + spec("product_choice.json") +
                    " --seeds 2 --seed 43");
  CHECK(r1.output != r3.output);
}

TEST_CASE("preannounce variant without eta exits 2") {
  auto r = run_cli("simulate --spec " + spec("product_choice.json") +
                   " --variant preannounce_feasibility --seeds 2");
  CHECK(r.exit_code == 2);
}

TEST_CASE("tampered t-bar override fails verification with exit 1") {
  auto r = run_cli("verify --spec " + spec("product_choice.json") +
                   " --t-bar 0");
  CHECK(r.exit_code == 1);
  json j = json::parse(r.output);
  CHECK_FALSE(j["all_pass"].get<bool>());
}

TEST_CASE("spec round-trips through serialization") {
  for (const char* name :
       {"product_choice.json", "bounded_memory.json", "quality_fullsupport.json",
        "preannounce.json"}) {
    SpecDocument a = load_spec_file(spec(name));
    SpecDocument b = load_spec_json(spec_to_json(a));
    INFO(name);
    CHECK(a.game.u1_table == b.game.u1_table);
    CHECK(a.game.u2_table == b.game.u2_table);
    CHECK(a.game.a_labels == b.game.a_labels);
    CHECK(a.env.joint_p == b.env.joint_p);
    CHECK(a.signals.f_table == b.signals.f_table);
    CHECK(a.signals.g_table == b.signals.g_table);
    CHECK(a.signals.memory_K == b.signals.memory_K);
    CHECK(a.has_sim == b.has_sim);
    if (a.has_sim) {
      CHECK(a.sim.delta == b.sim.delta);
      CHECK(a.sim.horizon == b.sim.horizon);
      CHECK(a.sim.num_seeds == b.sim.num_seeds);
      CHECK(a.sim.master_seed == b.sim.master_seed);
      CHECK(a.sim.variant == b.sim.variant);
      CHECK(a.sim.pi0 == b.sim.pi0);
      CHECK(a.sim.eta == b.sim.eta);
      CHECK(a.opp.name == b.opp.name);
      CHECK(a.opp.p_keep == b.opp.p_keep);
    }
    CHECK(a.has_quality == b.has_quality);
    if (a.has_quality) {
      CHECK(a.quality.game.g_table == b.quality.game.g_table);
      CHECK(a.quality.opp.effort == b.quality.opp.effort);
    }
    // second pass must be the identical document
    CHECK(spec_to_json(a) == spec_to_json(b));
  }
}

TEST_CASE("round12 keeps 12 significant digits") {
  CHECK(round12(0.1234567890123456) == Catch::Approx(0.123456789012).epsilon(1e-13));
  CHECK(round12(0.0) == 0.0);
  CHECK(round12(-1234567.890123456) == Catch::Approx(-1234567.89012).epsilon(1e-13));
  CHECK(std::isinf(round12(kInf)));
}

TEST_CASE("simulate writes trajectory CSV to the output directory") {
  auto dir = std::filesystem::temp_directory_path() / "repgame_cli_out";
  std::filesystem::remove_all(dir);
  auto r = run_cli("simulate --spec " + spec("product_choice.json") +
                   " --seeds 2 --out " + dir.string());
  REQUIRE(r.exit_code == 0);
  std::ifstream csv(dir / "trajectory_episode0.csv");
  REQUIRE(csv.good());
  std::string header;
  std::getline(csv, header);
  CHECK(header.rfind("t,theta,omega,m,a,b", 0) == 0);
  CHECK(std::filesystem::exists(dir / "sim_result.json"));
}
