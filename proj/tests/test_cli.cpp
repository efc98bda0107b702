#include <doctest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <nlohmann/json.hpp>
#include <string>

using nlohmann::json;

namespace {

std::string binary() {
  const char* p = std::getenv("CFGRAPH_BIN");
  REQUIRE_MESSAGE(p != nullptr, "CFGRAPH_BIN must point at the cli binary");
  return p;
}

struct RunResult {
  int exit_code = -1;
  std::string out;
};

RunResult run(const std::string& args) {
  RunResult r;
  const std::string cmd = binary() + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  const int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  REQUIRE(out.good());
  out << text;
}

const char* kSharedModel = R"({
  "semantics": "convolutional",
  "variables": [{"name": "x", "size": 2}],
  "factors": [
    {"name": "f", "scope": ["x"], "values": [1, 2]},
    {"name": "g", "scope": ["x"], "values": [3, 4]}
  ]
})";

const char* kChainModel = R"({
  "semantics": "convolutional",
  "variables": [{"name": "x1", "size": 2}, {"name": "x2", "size": 2}, {"name": "x3", "size": 2}],
  "factors": [
    {"name": "f1", "scope": ["x1", "x2"], "values": [0.1, 0.2, 0.3, 0.4]},
    {"name": "f2", "scope": ["x2", "x3"], "values": [0.4, 0.3, 0.2, 0.1]}
  ]
})";

}  // namespace

TEST_CASE("infer: evidence slice matches the hand example") {
  write_file("cli_shared.json", kSharedModel);
  write_file("cli_q.json", R"({"evidence": {"x": 0}, "check_against_oracle": true})");
  auto r = run("infer cli_shared.json cli_q.json");
  REQUIRE(r.exit_code == 0);
  auto j = json::parse(r.out);
  CHECK(j["values"][0] == 11.0);
  CHECK(j["oracle_max_deviation"].get<double>() <= 1e-12);
  CHECK(j["scope"].empty());
}

TEST_CASE("infer: empty query returns the full joint") {
  write_file("cli_shared.json", kSharedModel);
  auto r = run("infer cli_shared.json");
  REQUIRE(r.exit_code == 0);
  auto j = json::parse(r.out);
  CHECK(j["values"][0] == 11.0);
  CHECK(j["values"][1] == 10.0);
  CHECK(j["scope"][0] == "x");
}

TEST_CASE("infer: every method flag agrees") {
  write_file("cli_chain.json", kChainModel);
  write_file("cli_q2.json", R"({"marginalize": ["x2"], "evidence": {"x1": 1}})");
  json first;
  for (const std::string m : {"oracle", "elimination", "fft", "auto"}) {
    auto r = run("infer cli_chain.json cli_q2.json --method " + m);
    REQUIRE(r.exit_code == 0);
    auto j = json::parse(r.out);
    if (first.is_null()) {
      first = j;
    } else {
      REQUIRE(j["values"].size() == first["values"].size());
      for (std::size_t i = 0; i < j["values"].size(); ++i)
        CHECK(std::abs(j["values"][i].get<double>() - first["values"][i].get<double>()) <=
              1e-9);
    }
  }
}

TEST_CASE("exit code 2: malformed JSON") {
  write_file("cli_bad.json", "{ not json");
  CHECK(run("infer cli_bad.json").exit_code == 2);
  CHECK(run("infer cli_missing_file.json").exit_code == 2);
}

TEST_CASE("exit code 3: validation failure") {
  write_file("cli_invalid.json", R"({
    "semantics": "convolutional",
    "variables": [{"name": "x", "size": 2}, {"name": "y", "size": 2}],
    "factors": [{"name": "f", "scope": ["x"], "values": [1, 2]}]
  })");
  CHECK(run("infer cli_invalid.json").exit_code == 3);
  write_file("cli_chain.json", kChainModel);
  CHECK(run("check-indep cli_chain.json --A x1 --B x1").exit_code == 3);
}

TEST_CASE("exit code 4: fft on a multiplicative model") {
  write_file("cli_mult.json", R"({
    "semantics": "multiplicative",
    "variables": [{"name": "x", "size": 2}],
    "factors": [{"name": "f", "scope": ["x"], "values": [1, 2]}]
  })");
  write_file("cli_qe.json", R"({"evidence": {"x": 0}})");
  CHECK(run("infer cli_mult.json cli_qe.json --method fft").exit_code == 4);
}

TEST_CASE("exit code 5: oracle cap exceeded") {
  write_file("cli_chain.json", kChainModel);
  write_file("cli_qo.json", R"({"method": "oracle"})");
  CHECK(run("infer cli_chain.json cli_qo.json --oracle-cap 4").exit_code == 5);
}

TEST_CASE("check-indep: chain endpoints are independent under convolution") {
  write_file("cli_chain.json", kChainModel);
  auto r = run("check-indep cli_chain.json --A x1 --B x3");
  REQUIRE(r.exit_code == 0);
  auto j = json::parse(r.out);
  CHECK(j["independent"] == true);
  CHECK(j["max_deviation"].get<double>() <= 1e-9);
  CHECK(j["separated"] == true);
}

TEST_CASE("dualize: delta model and double-dual round trip") {
  write_file("cli_delta.json", R"({
    "semantics": "convolutional",
    "variables": [{"name": "x", "size": 4}],
    "factors": [{"name": "d", "scope": ["x"], "values": [1, 0, 0, 0]}]
  })");
  REQUIRE(run("dualize cli_delta.json cli_dual.json").exit_code == 0);
  auto jd = json::parse(std::ifstream("cli_dual.json"));
  CHECK(jd["semantics"] == "multiplicative");
  for (const auto& v : jd["factors"][0]["values"]) {
    if (v.is_array())
      CHECK(std::abs(v[0].get<double>() - 1.0) <= 1e-12);
    else
      CHECK(std::abs(v.get<double>() - 1.0) <= 1e-12);
  }
  REQUIRE(run("dualize cli_dual.json cli_dual2.json").exit_code == 0);
  auto j2 = json::parse(std::ifstream("cli_dual2.json"));
  CHECK(j2["semantics"] == "convolutional");
  CHECK(std::abs(j2["factors"][0]["values"][0].get<double>() - 1.0) <= 1e-10);
}

TEST_CASE("export-dot emits the bipartite graph") {
  write_file("cli_chain.json", kChainModel);
  auto r = run("export-dot cli_chain.json");
  REQUIRE(r.exit_code == 0);
  CHECK(r.out.find("circle") != std::string::npos);
  CHECK(r.out.find("square") != std::string::npos);
  CHECK(r.out.find("f2") != std::string::npos);
}

TEST_CASE("build-model: latent_sum spec through the CLI") {
  write_file("cli_ls.json", R"({
    "type": "latent_sum",
    "latents": [{"name": "u", "size": 3}, {"name": "v", "size": 3}],
    "blocks": [
      {"ids": ["u"], "values": [0.5, 0.3, 0.2]},
      {"ids": ["v"], "values": [0.6, 0.2, 0.2]}
    ],
    "sums": [["u", "v"]]
  })");
  REQUIRE(run("build-model cli_ls.json cli_ls_model.json --chain-dot cli_ls.dot").exit_code ==
          0);
  auto r = run("infer cli_ls_model.json");
  REQUIRE(r.exit_code == 0);
  auto j = json::parse(r.out);
  CHECK(std::abs(j["values"][0].get<double>() - 0.40) <= 1e-12);
  CHECK(std::abs(j["values"][1].get<double>() - 0.32) <= 1e-12);
  std::ifstream dot("cli_ls.dot");
  std::string text((std::istreambuf_iterator<char>(dot)), std::istreambuf_iterator<char>());
  CHECK(text.find(" -> ") != std::string::npos);
}

TEST_CASE("bench: csv output on tiny sizes") {
  auto r = run("bench --template star --length 3 --sizes 4 8 --reps 1 --csv");
  REQUIRE(r.exit_code == 0);
  CHECK(r.out.rfind("A,t_direct,t_fft,ratio", 0) == 0);
  int lines = 0;
  for (char c : r.out) lines += c == '\n';
  CHECK(lines == 3);
}
