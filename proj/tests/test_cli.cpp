#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "symkern/io.hpp"
#include "symkern/oracles.hpp"
#include "symkern_cli/commands.hpp"
#include "testutil.hpp"

using nlohmann::json;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Parses the '# {json}' header and the named column of every data row.
std::vector<double> column(const std::string& text, const std::string& name) {
  std::stringstream ss(text);
  std::string line;
  REQUIRE(std::getline(ss, line));  // config echo
  REQUIRE(line.rfind("# ", 0) == 0);
  REQUIRE(std::getline(ss, line));  // header
  std::vector<std::string> cols;
  {
    std::stringstream hs(line);
    std::string c;
    while (std::getline(hs, c, ',')) cols.push_back(c);
  }
  const auto it = std::find(cols.begin(), cols.end(), name);
  REQUIRE(it != cols.end());
  const std::size_t idx = it - cols.begin();
  std::vector<double> out;
  while (std::getline(ss, line)) {
    if (line.empty()) continue;
    std::stringstream ls(line);
    std::string cell;
    for (std::size_t i = 0; i <= idx; ++i) REQUIRE(std::getline(ls, cell, ','));
    out.push_back(std::stod(cell));
  }
  return out;
}

json echoed_config(const std::string& text) {
  std::stringstream ss(text);
  std::string line;
  REQUIRE(std::getline(ss, line));
  return json::parse(line.substr(2));
}

}  // namespace

TEST_CASE("kernel-eval") {
  json config{{"space", "h3"},
              {"seed", 7},
              {"out", "cli_kernel_eval_tmp.csv"},
              {"L", 2048},
              {"bases", 6},
              {"grid", {{"distances", {0.0, 1.0}}}}};

  const auto path = symkern::cli::run_command("kernel-eval", config);
  const auto text = slurp(path);

  SUBCASE("coincident pair gives sigma2 exactly") {
    const auto k = column(text, "k_hat");
    CHECK(k[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(column(text, "stderr")[0] == doctest::Approx(0.0).epsilon(1e-12));
  }

  SUBCASE("deterministic under the seed") {
    symkern::cli::run_command("kernel-eval", config);
    CHECK(slurp(path) == text);
  }

  SUBCASE("echoed config reruns to byte-identical output") {
    json echoed = echoed_config(text);
    echoed["out"] = "cli_kernel_eval_tmp2.csv";
    const auto path2 = symkern::cli::run_command("kernel-eval", echoed);
    const auto text2 = slurp(path2);
    // Outputs differ only through the echoed 'out' line.
    CHECK(text.substr(text.find('\n')) == text2.substr(text2.find('\n')));
    std::remove(path2.c_str());
  }

  SUBCASE("H3 grid matches the closed form within 5 stderr") {
    json big = config;
    big["out"] = "cli_kernel_eval_h3_tmp.csv";
    big["L"] = 4096;
    big["bases"] = 10;
    big["grid"] = {{"distances", {0.5, 1.0, 2.0}}};
    const auto p2 = symkern::cli::run_command("kernel-eval", big);
    const auto t2 = slurp(p2);
    const auto k = column(t2, "k_hat");
    const auto se = column(t2, "stderr");
    const auto d = column(t2, "dist");
    for (std::size_t i = 0; i < k.size(); ++i) {
      CHECK(std::abs(k[i] - symkern::heat_h3(d[i], 1.0)) < 5.0 * se[i]);
    }
    std::remove(p2.c_str());
  }

  std::remove(path.c_str());
}

TEST_CASE("sample-prior variance at the base point") {
  json config{{"space", "h2"},
              {"seed", 3},
              {"out", "cli_prior_tmp.csv"},
              {"L", 512},
              {"seeds", 400},
              {"grid", {{"distances", {0.0}}}}};
  const auto path = symkern::cli::run_command("sample-prior", config);
  const auto values = column(slurp(path), "f_value");
  REQUIRE(values.size() == 400);
  double mean = 0.0, var = 0.0;
  for (double v : values) mean += v;
  mean /= values.size();
  for (double v : values) var += (v - mean) * (v - mean);
  var /= values.size() - 1.0;
  // Var f(x0) = sigma2 exactly per basis; sampling noise is chi^2.
  CHECK(std::abs(var - 1.0) < 5.0 * std::sqrt(2.0 / values.size()));
  std::remove(path.c_str());
}

TEST_CASE("sample-prior nu sweep runs and is deterministic") {
  for (double nu : {0.5, 1.5, 2.5}) {
    json config{{"space", "h2"},
                {"seed", 1},
                {"out", "cli_prior_nu_tmp.csv"},
                {"L", 128},
                {"kernel", {{"nu", nu}, {"kappa", 1.0}, {"sigma2", 1.0}}}};
    const auto path = symkern::cli::run_command("sample-prior", config);
    const auto first = slurp(path);
    CHECK(column(first, "f_value").size() == 5);
    symkern::cli::run_command("sample-prior", config);
    CHECK(slurp(path) == first);
    std::remove(path.c_str());
  }
}

TEST_CASE("gp-posterior") {
  // Small dataset on H2 written to disk first.
  symkern::Dataset data;
  symkern::Rng rng(81);
  for (double r : {0.2, 0.8, 1.4}) {
    data.points.push_back(symkern::act(symkern::hyperbolic_boost(r, 2),
                                         symkern::hyperbolic_base_point(2)));
  }
  data.y.resize(3);
  data.y << 1.0, 0.5, -0.25;
  data.noise = Eigen::VectorXd::Constant(3, 1e-6);
  symkern::save_dataset(data, "cli_gp_dataset_tmp.json");

  json config{{"space", "h2"},
              {"seed", 5},
              {"out", "cli_gp_tmp.csv"},
              {"L", 2048},
              {"dataset", "cli_gp_dataset_tmp.json"},
              {"samples", 64},
              {"query", {{"distances", {0.2, 0.8, 1.4}}}}};
  const auto path = symkern::cli::run_command("gp-posterior", config);
  const auto text = slurp(path);

  SUBCASE("training-point mean approaches y at tiny noise") {
    const auto mean = column(text, "mean");
    CHECK(mean[0] == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(mean[1] == doctest::Approx(0.5).epsilon(1e-3));
    CHECK(mean[2] == doctest::Approx(-0.25).epsilon(1e-3));
  }

  SUBCASE("pathwise sample columns match the mean/std columns") {
    const auto mean = column(text, "mean");
    const auto sd = column(text, "std");
    for (int i = 0; i < 3; ++i) {
      std::vector<double> samples;
      for (int k = 0; k < 64; ++k) {
        samples.push_back(column(text, "sample_" + std::to_string(k))[i]);
      }
      const auto ms = testutil::mean_stderr(samples);
      CHECK(std::abs(ms.mean - mean[i]) <
            5.0 * (sd[i] / std::sqrt(64.0) + 1e-6));
    }
  }

  SUBCASE("empty dataset reduces to the prior") {
    json prior_config = config;
    prior_config.erase("dataset");
    prior_config["out"] = "cli_gp_prior_tmp.csv";
    const auto p2 = symkern::cli::run_command("gp-posterior", prior_config);
    const auto mean = column(slurp(p2), "mean");
    const auto sd = column(slurp(p2), "std");
    for (int i = 0; i < 3; ++i) {
      CHECK(mean[i] == doctest::Approx(0.0));
      // prior std at a non-base point carries O(1/sqrt(L)) Gram noise
      CHECK(sd[i] == doctest::Approx(1.0).epsilon(0.15));
    }
    std::remove(p2.c_str());
  }

  std::remove(path.c_str());
  std::remove("cli_gp_dataset_tmp.json");
}

TEST_CASE("error-curve") {
  json config{{"space", "h3"},
              {"seed", 2},
              {"out", "cli_error_tmp.csv"},
              {"seeds", 12},
              {"L_list", {64, 256, 1024, 4096}},
              {"grid", {{"distances", {0.5, 1.0, 1.5}}}}};
  const auto path = symkern::cli::run_command("error-curve", config);
  const auto text = slurp(path);
  const auto ls = column(text, "L");
  const auto med = column(text, "relative_error_median");
  const auto q25 = column(text, "relative_error_q25");
  const auto q75 = column(text, "relative_error_q75");
  REQUIRE(med.size() == 4);
  CHECK(med.back() < med.front());
  for (std::size_t i = 0; i < med.size(); ++i) {
    CHECK(q25[i] <= med[i]);
    CHECK(med[i] <= q75[i]);
  }
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < ls.size(); ++i) {
    lx.push_back(std::log(ls[i]));
    ly.push_back(std::log(med[i]));
  }
  const double slope = testutil::fit_slope(lx, ly);
  CHECK(slope > -0.65);
  CHECK(slope < -0.35);
  std::remove(path.c_str());
}

TEST_CASE("error-curve reference resolution") {
  // No closed form on H4: "auto" falls back to a Monte Carlo reference,
  // while demanding "oracle" is an error.
  json config{{"space", "h4"},
              {"seed", 5},
              {"out", "cli_error_h4_tmp.csv"},
              {"seeds", 8},
              {"L_list", {64, 4096}},
              {"L_ref", 32768},
              {"grid", {{"distances", {0.5, 1.0}}}}};
  const auto path = symkern::cli::run_command("error-curve", config);
  const auto med = column(slurp(path), "relative_error_median");
  CHECK(med[1] < med[0]);
  std::remove(path.c_str());

  config["reference"] = "oracle";
  CHECK_THROWS_AS(symkern::cli::run_command("error-curve", config),
                  std::invalid_argument);
}

TEST_CASE("accept-rate") {
  json config{{"space", "h3"},
              {"seed", 4},
              {"out", "cli_accept_tmp.csv"},
              {"trials", 500},
              {"kappas", {0.01, 1.0, 100.0}}};
  const auto path = symkern::cli::run_command("accept-rate", config);
  const auto rates = column(slurp(path), "rate");
  for (double r : rates) CHECK(r == 1.0);  // odd-dimension sampler is exact
  std::remove(path.c_str());

  config["space"] = "h2";
  config["trials"] = 20000;
  const auto path2 = symkern::cli::run_command("accept-rate", config);
  const auto rates2 = column(slurp(path2), "rate");
  CHECK(rates2.front() > 0.9);
  CHECK(rates2.back() < rates2.front());
  std::remove(path2.c_str());
}

TEST_CASE("range-curve columns") {
  json config{{"space", "h2"},
              {"seed", 6},
              {"out", "cli_range_tmp.csv"},
              {"L", 4096},
              {"bases", 4},
              {"limit_L", 20000},
              {"distance", 1.0},
              {"kappas", {0.5, 5.0, 50.0}}};
  const auto path = symkern::cli::run_command("range-curve", config);
  const auto text = slurp(path);
  const auto k_hat = column(text, "k_hat");
  const auto limit = column(text, "limiting");
  REQUIRE(k_hat.size() == 3);
  // Heat kernel approaches the limiting value as kappa grows.
  CHECK(k_hat[0] < k_hat[2]);
  CHECK(limit[0] == limit[1]);
  CHECK(k_hat[2] < limit[2] + 0.05);
  std::remove(path.c_str());
}

TEST_CASE("spectral-sample") {
  json config{{"space", "spd2"},
              {"seed", 9},
              {"out", "cli_spectral_tmp.csv"},
              {"count", 200}};
  const auto path = symkern::cli::run_command("spectral-sample", config);
  const auto text = slurp(path);
  CHECK(column(text, "lambda0").size() == 200);
  CHECK(column(text, "lambda1").size() == 200);
  for (double p : column(text, "proposals")) CHECK(p >= 1.0);
  std::remove(path.c_str());
}

TEST_CASE("unknown command is rejected") {
  CHECK_THROWS_AS(symkern::cli::run_command("not-a-command", json::object()),
                  std::invalid_argument);
  CHECK(symkern::cli::is_command("kernel-eval"));
  CHECK(!symkern::cli::is_command("plot"));
}
