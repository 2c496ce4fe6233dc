#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cli.hpp"

namespace {

using chernoff::cli::run;
using nlohmann::json;

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "chernoff");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

TEST(Cli, PolysReproduceTable) {
  const Outcome r = invoke({"polys", "--max-n", "12"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("p_6(z) = -31/21*z^3 + 26/21\n"), std::string::npos);
  EXPECT_NE(r.out.find("p_8(z) = 127/15*z^4 - 196/9*z\n"), std::string::npos);
  EXPECT_NE(r.out.find("p_10(z) = -2555/33*z^5 + 13160/33*z^2\n"), std::string::npos);
  EXPECT_NE(r.out.find("p_12(z) = 1414477/1365*z^6 - 2419532/273*z^3 + 1989472/1365\n"),
            std::string::npos);
  EXPECT_TRUE(r.err.empty());
}

TEST(Cli, PolysSmallCases) {
  EXPECT_EQ(invoke({"polys", "--max-n", "0"}).out, "p_0(z) = 1\n");
  EXPECT_EQ(invoke({"polys", "--max-n", "3"}).out,
            "p_0(z) = 1\np_1(z) = 0\np_2(z) = -1/3*z\np_3(z) = 0\n");
}

TEST(Cli, PolysJsonUsesRationalStrings) {
  const Outcome r = invoke({"polys", "--max-n", "4", "--json"});
  ASSERT_EQ(r.code, 0);
  const json j = json::parse(r.out);
  ASSERT_EQ(j.size(), 5u);
  EXPECT_EQ(j[2]["coeffs"]["1"], "-1/3");
  EXPECT_EQ(j[4]["coeffs"]["2"], "7/15");
  EXPECT_TRUE(j[1]["coeffs"].empty());
  const Outcome csv = invoke({"polys", "--max-n", "2", "--format", "csv"});
  EXPECT_EQ(csv.out, "n,j,coeff\n0,0,1/1\n2,1,-1/3\n");
}

TEST(Cli, VerifyPassesAndNegativeControlFails) {
  const Outcome ok = invoke({"verify", "--max-n", "12"});
  EXPECT_EQ(ok.code, 0) << ok.out;
  EXPECT_EQ(ok.out.find("FAIL"), std::string::npos);

  const Outcome even = invoke({"verify", "--max-n", "12", "--inject-fault", "12"});
  EXPECT_EQ(even.code, 1);
  EXPECT_NE(even.out.find("FAIL conjectures"), std::string::npos);
  EXPECT_NE(even.out.find("n=12"), std::string::npos);

  const Outcome odd = invoke({"verify", "--max-n", "12", "--inject-fault", "7", "--json"});
  EXPECT_EQ(odd.code, 1);
  EXPECT_FALSE(json::parse(odd.out)["pass"].get<bool>());
}

TEST(Cli, VerifyToOneHundred) {
  EXPECT_EQ(invoke({"verify", "--max-n", "100"}).code, 0);
}

TEST(Cli, MomentJson) {
  const Outcome r = invoke({"moment", "--n", "0", "--gamma", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  EXPECT_NEAR(j["value"].get<double>(), 1.0, 1e-8);
  EXPECT_EQ(j["quantity"], "moment");
  EXPECT_EQ(j["n"], 0);
  EXPECT_GE(j["err_estimate"].get<double>(), 0.0);
  EXPECT_EQ(j["contour"]["sigma"], 0.0);

  const json second = json::parse(invoke({"moment", "--n", "2", "--sigma", "0.5"}).out);
  EXPECT_NEAR(second["value"].get<double>(), 0.418374851855363, 1e-10);
  EXPECT_EQ(second["contour"]["sigma"], 0.5);
}

TEST(Cli, CharFnAndMgf) {
  const json cf = json::parse(invoke({"cf", "--t", "0"}).out);
  EXPECT_NEAR(cf["value"].get<double>(), 1.0, 1e-10);
  EXPECT_TRUE(cf.contains("value_imag"));

  const json cf1 = json::parse(invoke({"cf", "--t", "1"}).out);
  const json mgf = json::parse(invoke({"mgf", "--t-im", "1"}).out);
  EXPECT_NEAR(cf1["value"].get<double>(), mgf["value"].get<double>(), 1e-8);

  const json shifted = json::parse(invoke({"mgf", "--t-re", "-5"}).out);
  EXPECT_GT(shifted["contour"]["sigma"].get<double>(), 3.0);

  // Scale family: V_gamma = 2^{-1/3} gamma^{-2/3} V.
  const json cf_gamma = json::parse(invoke({"cf", "--t", "1", "--gamma", "2"}).out);
  const double s = std::cbrt(0.5) * std::pow(2.0, -2.0 / 3);
  const json cf_scaled = json::parse(invoke({"cf", "--t", std::to_string(s)}).out);
  EXPECT_NEAR(cf_gamma["value"].get<double>(), cf_scaled["value"].get<double>(), 1e-9);
}

TEST(Cli, MeanMax) {
  const json j = json::parse(invoke({"mean-max", "--gamma", "1"}).out);
  const json m2 = json::parse(invoke({"moment", "--n", "2", "--gamma", "1"}).out);
  EXPECT_NEAR(j["value"].get<double>(), 3 * m2["value"].get<double>(), 1e-6);
}

TEST(Cli, DensityIntegratesToOne) {
  const Outcome r = invoke({"density", "--from", "-4", "--to", "4", "--step", "0.05"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream lines(r.out);
  std::string line;
  std::getline(lines, line);
  EXPECT_EQ(line, "x,f");
  std::vector<std::pair<double, double>> pts;
  while (std::getline(lines, line)) {
    const auto comma = line.find(',');
    pts.push_back({std::stod(line.substr(0, comma)), std::stod(line.substr(comma + 1))});
  }
  ASSERT_EQ(pts.size(), 161u);
  double mass = 0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    mass += 0.5 * (pts[i + 1].first - pts[i].first) * (pts[i].second + pts[i + 1].second);
  }
  EXPECT_NEAR(mass, 1.0, 1e-6);
}

TEST(Cli, OutputFile) {
  const auto path = std::filesystem::temp_directory_path() / "chernoff_cli_polys.txt";
  const Outcome r = invoke({"polys", "--max-n", "2", "--output", path.string()});
  EXPECT_EQ(r.code, 0);
  EXPECT_TRUE(r.out.empty());
  EXPECT_EQ(slurp(path), "p_0(z) = 1\np_1(z) = 0\np_2(z) = -1/3*z\n");
  std::filesystem::remove(path);
}

TEST(Cli, SimulateIsReproducible) {
  const auto dir = std::filesystem::temp_directory_path();
  const std::string a = (dir / "chernoff_cli_sim_a").string();
  const std::string b = (dir / "chernoff_cli_sim_b").string();
  const std::vector<std::string> common = {"simulate", "--paths", "300", "--step", "0.01",
                                           "--seed", "12", "--threads", "2"};
  auto with_out = [&](const std::string& prefix) {
    auto args = common;
    args.push_back("--out");
    args.push_back(prefix);
    return args;
  };
  const Outcome ra = invoke(with_out(a));
  const Outcome rb = invoke(with_out(b));
  ASSERT_EQ(ra.code, 0) << ra.err;
  EXPECT_EQ(ra.out, rb.out);
  EXPECT_EQ(slurp(a + ".csv"), slurp(b + ".csv"));
  EXPECT_EQ(slurp(a + ".json"), slurp(b + ".json"));
  const json sidecar = json::parse(slurp(a + ".json"));
  EXPECT_EQ(sidecar["seed"], 12);
  EXPECT_EQ(sidecar["num_paths"], 300);
  EXPECT_NE(ra.out.find("v_moment(2) = "), std::string::npos);
  for (const auto& p : {a, b}) {
    std::filesystem::remove(p + ".csv");
    std::filesystem::remove(p + ".json");
  }
}

TEST(Cli, SimulateWarnsOnShortHorizon) {
  const std::string prefix = (std::filesystem::temp_directory_path() / "chernoff_cli_short").string();
  const Outcome r = invoke({"simulate", "--paths", "200", "--step", "0.01", "--horizon", "0.8",
                            "--out", prefix});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.err.find("warning"), std::string::npos);
  std::filesystem::remove(prefix + ".csv");
  std::filesystem::remove(prefix + ".json");
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(invoke({}).code, 2);
  EXPECT_EQ(invoke({"bogus"}).code, 2);
  EXPECT_EQ(invoke({"moment"}).code, 2);
  EXPECT_EQ(invoke({"moment", "--n", "-1"}).code, 2);
  EXPECT_EQ(invoke({"moment", "--n", "2", "--gamma", "0"}).code, 2);
  EXPECT_EQ(invoke({"moment", "--n", "2", "--json", "--csv"}).code, 2);
  EXPECT_EQ(invoke({"moment", "--n", "2", "--format", "xml"}).code, 2);
  EXPECT_EQ(invoke({"polys", "--max-n", "2", "--format", "json", "--json"}).code, 2);
  EXPECT_EQ(invoke({"verify", "--max-n", "1"}).code, 2);
  EXPECT_EQ(invoke({"simulate", "--paths", "10"}).code, 2);

  const Outcome left = invoke({"moment", "--n", "2", "--sigma", "-3"});
  EXPECT_EQ(left.code, 2);
  EXPECT_TRUE(left.out.empty());
  EXPECT_FALSE(left.err.empty());
  EXPECT_EQ(invoke({"--help"}).code, 0);
}

TEST(Cli, RelTolFromEnvironment) {
  ::setenv("CHERNOFF_RELTOL", "1e-6", 1);
  const json loose = json::parse(invoke({"moment", "--n", "2"}).out);
  EXPECT_EQ(loose["contour"]["rel_tol"], 1e-6);
  ::setenv("CHERNOFF_RELTOL", "nonsense", 1);
  EXPECT_EQ(invoke({"moment", "--n", "2"}).code, 2);
  ::unsetenv("CHERNOFF_RELTOL");
}

TEST(Cli, NumericalFailureExitCode) {
  ::setenv("CHERNOFF_RELTOL", "1e-30", 1);
  const Outcome r = invoke({"moment", "--n", "12"});
  ::unsetenv("CHERNOFF_RELTOL");
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("numerical failure"), std::string::npos);
}

TEST(Cli, NumericIdentitySuite) {
  const auto checks = chernoff::cli::numeric_identity_suite(1e-10);
  EXPECT_EQ(checks.size(), 6u);
  for (const auto& c : checks) EXPECT_TRUE(c.pass) << c.name << " " << c.detail;
}

}  // namespace
