#include "symkern_cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "symkern/features.hpp"
#include "symkern/gp.hpp"
#include "symkern/io.hpp"
#include "symkern/oracles.hpp"
#include "symkern/rng.hpp"

namespace symkern::cli {

namespace {

using nlohmann::json;

struct CsvWriter {
  std::ostringstream out;

  explicit CsvWriter(const json& config) {
    out << "# " << config.dump() << "\n";
  }

  void header(const std::vector<std::string>& cols) {
    for (std::size_t i = 0; i < cols.size(); ++i) {
      out << (i ? "," : "") << cols[i];
    }
    out << "\n";
  }

  void row(const std::vector<double>& vals) {
    out << std::setprecision(17);
    for (std::size_t i = 0; i < vals.size(); ++i) {
      out << (i ? "," : "") << vals[i];
    }
    out << "\n";
  }

  void write(const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f.good()) throw std::runtime_error("cannot open output file " + path);
    f << out.str();
  }
};

KernelSpec spec_from_config(const json& config) {
  return spec_from_json(config.at("kernel").dump());
}

SamplingMethod method_from_config(const json& config) {
  const std::string m = config.at("method").get<std::string>();
  if (m == "rejection") return SamplingMethod::rejection;
  if (m == "importance") return SamplingMethod::importance;
  throw std::invalid_argument("method must be rejection or importance");
}

/// Point at geodesic distance s from the base point: a boost along the first
/// axis for H_n, the unit-speed diagonal geodesic for SPD(d).
ManifoldPoint geodesic_point(SpaceId space, double s) {
  if (space.kind == Space::hyperbolic) {
    return act(hyperbolic_boost(s, space.dim),
                 hyperbolic_base_point(space.dim));
  }
  const int d = space.dim;
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(d);
  diag[0] = 1.0 / std::sqrt(2.0);
  diag[1] = -1.0 / std::sqrt(2.0);
  return SpdPoint{(s * diag).array().exp().matrix().asDiagonal()};
}

std::vector<ManifoldPoint> grid_points(const json& config, SpaceId space,
                                       const char* key = "grid") {
  std::vector<ManifoldPoint> pts;
  const json& grid = config.at(key);
  if (grid.contains("points")) {
    for (const auto& p : grid.at("points")) {
      pts.push_back(point_from_json(p.dump()));
      if (!(space_of(pts.back()) == space)) {
        throw std::invalid_argument("grid point space does not match config");
      }
    }
  } else {
    for (double s : grid.at("distances").get<std::vector<double>>()) {
      pts.push_back(geodesic_point(space, s));
    }
  }
  if (pts.empty()) throw std::invalid_argument("empty grid");
  return pts;
}

std::vector<std::string> coord_names(SpaceId space) {
  std::vector<std::string> names;
  if (space.kind == Space::hyperbolic) {
    for (int i = 0; i <= space.dim; ++i) names.push_back("v" + std::to_string(i));
  } else {
    for (int i = 0; i < space.dim; ++i)
      for (int j = 0; j < space.dim; ++j)
        names.push_back("s" + std::to_string(i) + std::to_string(j));
  }
  return names;
}

std::vector<double> coords(const ManifoldPoint& p) {
  if (const auto* h = std::get_if<HyperbolicPoint>(&p)) {
    return {h->v.data(), h->v.data() + h->v.size()};
  }
  const auto& s = std::get<SpdPoint>(p);
  std::vector<double> out;
  for (int i = 0; i < s.d(); ++i)
    for (int j = 0; j < s.d(); ++j) out.push_back(s.S(i, j));
  return out;
}

void set_default(json& config, const char* key, const json& value) {
  if (!config.contains(key)) config[key] = value;
}

void common_defaults(json& config, const char* name) {
  set_default(config, "space", "h2");
  set_default(config, "seed", 0);
  set_default(config, "out", std::string(name) + ".csv");
  set_default(config, "L", 4096);
  set_default(config, "method", "rejection");
  if (!config.contains("kernel")) config["kernel"] = json::object();
  set_default(config["kernel"], "nu", "inf");
  set_default(config["kernel"], "kappa", 1.0);
  set_default(config["kernel"], "sigma2", 1.0);
  set_default(config["kernel"], "laplacian", "ordinary");
}

json default_log_grid() {
  return json::array({0.01, 0.0316, 0.1, 0.316, 1.0, 3.16, 10.0, 31.6, 100.0});
}

// ---------------------------------------------------------------------------

void cmd_kernel_eval(json& config, CsvWriter& csv) {
  const SpaceId space = parse_space(config.at("space").get<std::string>());
  const KernelSpec spec = spec_from_config(config);
  const auto method = method_from_config(config);
  const int count = config.at("L").get<int>();
  const int bases = config.at("bases").get<int>();
  const std::uint64_t seed = config.at("seed").get<std::uint64_t>();
  const auto pts = grid_points(config, space);
  const ManifoldPoint x0 = base_point(space);

  Eigen::MatrixXd vals(bases, pts.size());
  for (int b = 0; b < bases; ++b) {
    Rng rng = Rng::stream(seed, "kernel-eval/basis", b);
    const FeatureBasis basis = build_basis(spec, space, count, method, rng, seed);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      vals(b, i) = kernel_estimate(basis, x0, pts[i]);
    }
  }

  auto names = coord_names(space);
  names.insert(names.end(), {"dist", "k_hat", "stderr"});
  csv.header(names);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    std::vector<double> row = coords(pts[i]);
    const double mean = vals.col(i).mean();
    const double sd =
        bases > 1 ? std::sqrt((vals.col(i).array() - mean).square().sum() /
                              (bases - 1.0) / bases)
                  : 0.0;
    row.push_back(dist(x0, pts[i]));
    row.push_back(mean);
    row.push_back(sd);
    csv.row(row);
  }
}

void cmd_sample_prior(json& config, CsvWriter& csv) {
  const SpaceId space = parse_space(config.at("space").get<std::string>());
  const KernelSpec spec = spec_from_config(config);
  const auto method = method_from_config(config);
  const int count = config.at("L").get<int>();
  const int seeds = config.at("seeds").get<int>();
  const std::uint64_t seed = config.at("seed").get<std::uint64_t>();
  const auto pts = grid_points(config, space);

  auto names = coord_names(space);
  names.insert(names.begin(), "seed");
  names.push_back("f_value");
  csv.header(names);
  for (int s = 0; s < seeds; ++s) {
    Rng rng = Rng::stream(seed, "sample-prior/basis", s);
    const FeatureBasis basis = build_basis(spec, space, count, method, rng, seed);
    const Eigen::VectorXd f = prior_sample(basis, pts);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      std::vector<double> row{static_cast<double>(s)};
      const auto c = coords(pts[i]);
      row.insert(row.end(), c.begin(), c.end());
      row.push_back(f[i]);
      csv.row(row);
    }
  }
}

void cmd_gp_posterior(json& config, CsvWriter& csv) {
  const SpaceId space = parse_space(config.at("space").get<std::string>());
  const KernelSpec spec = spec_from_config(config);
  const auto method = method_from_config(config);
  const int count = config.at("L").get<int>();
  const int samples = config.at("samples").get<int>();
  const std::uint64_t seed = config.at("seed").get<std::uint64_t>();
  const auto query = grid_points(config, space, "query");

  Dataset data;
  if (config.contains("dataset")) {
    data = load_dataset(config.at("dataset").get<std::string>());
    for (const auto& p : data.points) {
      if (!(space_of(p) == space)) {
        throw std::invalid_argument("dataset space does not match config");
      }
    }
  }

  Rng rng = Rng::stream(seed, "gp-posterior/basis", 0);
  const FeatureBasis basis = build_basis(spec, space, count, method, rng, seed);
  const auto moments = posterior_moments(basis, data, query);
  Eigen::MatrixXd paths;
  if (samples > 0) {
    Rng path_rng = Rng::stream(seed, "gp-posterior/paths", 0);
    paths = posterior_sample_batch(basis, data, query, samples, path_rng);
  }

  auto names = coord_names(space);
  names.insert(names.end(), {"mean", "std"});
  for (int k = 0; k < samples; ++k) names.push_back("sample_" + std::to_string(k));
  csv.header(names);
  for (std::size_t i = 0; i < query.size(); ++i) {
    std::vector<double> row = coords(query[i]);
    row.push_back(moments.mean[i]);
    row.push_back(std::sqrt(std::max(0.0, moments.cov(i, i))));
    for (int k = 0; k < samples; ++k) row.push_back(paths(k, i));
    csv.row(row);
  }
}

// Reference kernel for the error curve; closed forms where available.
struct ErrorReference {
  bool from_oracle = false;
  Eigen::MatrixXd k;
};

bool oracle_reference_available(SpaceId space, const KernelSpec& spec) {
  if (space.kind == Space::spd) return space.dim == 2 && spec.is_heat();
  if (spec.laplacian != Laplacian::ordinary) return false;
  if (space.dim == 2) return spec.is_heat();
  if (space.dim == 3) return true;
  return space.dim % 2 == 1 && spec.is_heat();
}

ErrorReference error_reference(const json& config, SpaceId space,
                               const KernelSpec& spec,
                               const std::vector<ManifoldPoint>& pts,
                               std::uint64_t seed) {
  // "auto" resolves to the closed form when one exists, else to a large
  // Monte Carlo basis; "oracle" demands the closed form.
  std::string mode = config.at("reference").get<std::string>();
  const bool available = oracle_reference_available(space, spec);
  if (mode == "auto") mode = available ? "oracle" : "mc";
  if (mode == "oracle" && !available) {
    throw std::invalid_argument("no closed-form reference for this config");
  }

  const auto n = static_cast<Eigen::Index>(pts.size());
  ErrorReference ref;
  ref.k.resize(n, n);
  auto oracle_value = [&](double d) -> double {
    if (space.kind == Space::hyperbolic && space.dim == 2) {
      return heat_h2(d, spec.kappa);
    }
    if (space.kind == Space::hyperbolic && space.dim == 3) {
      return spec.is_heat() ? heat_h3(d, spec.kappa)
                            : matern_h3(spec.nu, spec.kappa, d);
    }
    return heat_hn_millson(space.dim, d, spec.kappa);
  };
  if (mode == "oracle") {
    ref.from_oracle = true;
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = i; j < n; ++j) {
        double v;
        if (space.kind == Space::spd) {
          v = heat_spd2(std::get<SpdPoint>(pts[i]), std::get<SpdPoint>(pts[j]),
                        spec.kappa);
        } else {
          v = oracle_value(dist(pts[i], pts[j]));
        }
        ref.k(i, j) = ref.k(j, i) = spec.sigma2 * v;
      }
    }
    return ref;
  }
  const int l_ref = config.at("L_ref").get<int>();
  Rng rng = Rng::stream(seed, "error-curve/reference", 0);
  const FeatureBasis basis =
      build_basis(spec, space, l_ref, SamplingMethod::rejection, rng, seed);
  ref.k = kernel_matrix(basis, pts);
  return ref;
}

void cmd_error_curve(json& config, CsvWriter& csv) {
  const SpaceId space = parse_space(config.at("space").get<std::string>());
  const KernelSpec spec = spec_from_config(config);
  const auto method = method_from_config(config);
  const int seeds = config.at("seeds").get<int>();
  const std::uint64_t seed = config.at("seed").get<std::uint64_t>();
  const auto l_list = config.at("L_list").get<std::vector<int>>();
  const auto pts = grid_points(config, space);
  const auto ref = error_reference(config, space, spec, pts, seed);
  const double ref_norm = ref.k.norm();

  csv.header({"L", "relative_error_median", "relative_error_q25",
              "relative_error_q75"});
  for (std::size_t li = 0; li < l_list.size(); ++li) {
    std::vector<double> errs(seeds);
    for (int s = 0; s < seeds; ++s) {
      Rng rng = Rng::stream(seed, "error-curve/basis",
                            li * 1000 + static_cast<std::uint64_t>(s));
      const FeatureBasis basis =
          build_basis(spec, space, l_list[li], method, rng, seed);
      errs[s] = (kernel_matrix(basis, pts) - ref.k).norm() / ref_norm;
    }
    std::sort(errs.begin(), errs.end());
    auto quantile = [&errs](double q) {
      const double pos = q * (errs.size() - 1);
      const std::size_t lo = static_cast<std::size_t>(pos);
      const std::size_t hi = std::min(lo + 1, errs.size() - 1);
      return errs[lo] + (pos - lo) * (errs[hi] - errs[lo]);
    };
    csv.row({static_cast<double>(l_list[li]), quantile(0.5), quantile(0.25),
             quantile(0.75)});
  }
}

void cmd_accept_rate(json& config, CsvWriter& csv) {
  const SpaceId space = parse_space(config.at("space").get<std::string>());
  KernelSpec spec = spec_from_config(config);
  const long trials = config.at("trials").get<long>();
  const std::uint64_t seed = config.at("seed").get<std::uint64_t>();
  const auto kappas = config.at("kappas").get<std::vector<double>>();

  csv.header({"kappa", "rate", "stderr"});
  for (std::size_t i = 0; i < kappas.size(); ++i) {
    spec.kappa = kappas[i];
    Rng rng = Rng::stream(seed, "accept-rate", i);
    const auto est = acceptance_rate(spec, space, trials, rng);
    csv.row({kappas[i], est.rate, est.std_error});
  }
}

void cmd_range_curve(json& config, CsvWriter& csv) {
  const SpaceId space = parse_space(config.at("space").get<std::string>());
  KernelSpec spec = spec_from_config(config);
  const auto method = method_from_config(config);
  const int count = config.at("L").get<int>();
  const int bases = config.at("bases").get<int>();
  const int limit_count = config.at("limit_L").get<int>();
  const double distance = config.at("distance").get<double>();
  const std::uint64_t seed = config.at("seed").get<std::uint64_t>();
  const auto kappas = config.at("kappas").get<std::vector<double>>();

  const ManifoldPoint x0 = base_point(space);
  const ManifoldPoint x1 = geodesic_point(space, distance);
  Rng limit_rng = Rng::stream(seed, "range-curve/limit", 0);
  const auto limit = limiting_kernel(x0, x1, limit_count, limit_rng);

  csv.header({"kappa", "k_hat", "stderr", "limiting", "limiting_stderr"});
  for (std::size_t i = 0; i < kappas.size(); ++i) {
    spec.kappa = kappas[i];
    Eigen::VectorXd vals(bases);
    for (int b = 0; b < bases; ++b) {
      Rng rng = Rng::stream(seed, "range-curve/basis", i * 1000 + b);
      const FeatureBasis basis = build_basis(spec, space, count, method, rng, seed);
      vals[b] = kernel_estimate(basis, x0, x1) / spec.sigma2;
    }
    const double mean = vals.mean();
    const double sd =
        bases > 1
            ? std::sqrt((vals.array() - mean).square().sum() / (bases - 1.0) /
                        bases)
            : 0.0;
    csv.row({kappas[i], mean, sd, limit.value, limit.std_error});
  }
}

void cmd_spectral_sample(json& config, CsvWriter& csv) {
  const SpaceId space = parse_space(config.at("space").get<std::string>());
  const KernelSpec spec = spec_from_config(config);
  const int count = config.at("count").get<int>();
  const std::uint64_t seed = config.at("seed").get<std::uint64_t>();

  std::vector<std::string> names{"index"};
  const int ncomp = space.kind == Space::hyperbolic ? 1 : space.dim;
  for (int j = 0; j < ncomp; ++j) names.push_back("lambda" + std::to_string(j));
  names.push_back("proposals");
  csv.header(names);

  Rng rng = Rng::stream(seed, "spectral-sample", 0);
  for (int i = 0; i < count; ++i) {
    const SpectralDraw draw =
        space.kind == Space::hyperbolic
            ? rejection_sample_hyp(spec, space.dim, rng)
            : rejection_sample_spd(spec, space.dim, rng);
    std::vector<double> row{static_cast<double>(i)};
    for (int j = 0; j < ncomp; ++j) row.push_back(draw.lambda[j]);
    row.push_back(static_cast<double>(draw.proposals));
    csv.row(row);
  }
}

}  // namespace

bool is_command(const std::string& name) {
  static const char* names[] = {"kernel-eval",  "sample-prior", "gp-posterior",
                                "error-curve",  "accept-rate",  "range-curve",
                                "spectral-sample"};
  return std::find_if(std::begin(names), std::end(names), [&](const char* n) {
           return name == n;
         }) != std::end(names);
}

std::string run_command(const std::string& name, json config) {
  if (!is_command(name)) {
    throw std::invalid_argument("unknown command " + name);
  }
  common_defaults(config, name.c_str());
  if (name == "kernel-eval") {
    set_default(config, "bases", 10);
    if (!config.contains("grid")) {
      config["grid"] = {{"distances", {0.25, 0.5, 1.0, 1.5, 2.0}}};
    }
  } else if (name == "sample-prior") {
    set_default(config, "seeds", 1);
    if (!config.contains("grid")) {
      config["grid"] = {{"distances", {0.0, 0.5, 1.0, 1.5, 2.0}}};
    }
  } else if (name == "gp-posterior") {
    set_default(config, "samples", 0);
    if (!config.contains("query")) {
      config["query"] = {{"distances", {0.0, 0.5, 1.0, 1.5, 2.0}}};
    }
  } else if (name == "error-curve") {
    set_default(config, "seeds", 20);
    set_default(config, "L_list", json::array({64, 128, 256, 512, 1024, 2048, 4096, 8192}));
    set_default(config, "reference", "auto");
    set_default(config, "L_ref", 131072);
    if (!config.contains("grid")) {
      config["grid"] = {{"distances", {0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0}}};
    }
  } else if (name == "accept-rate") {
    set_default(config, "trials", 20000);
    set_default(config, "kappas", default_log_grid());
  } else if (name == "range-curve") {
    set_default(config, "bases", 10);
    set_default(config, "L", 32768);
    set_default(config, "limit_L", 200000);
    set_default(config, "distance", 1.5);
    set_default(config, "kappas", default_log_grid());
  } else if (name == "spectral-sample") {
    set_default(config, "count", 10000);
  }

  CsvWriter csv(config);
  if (name == "kernel-eval") cmd_kernel_eval(config, csv);
  else if (name == "sample-prior") cmd_sample_prior(config, csv);
  else if (name == "gp-posterior") cmd_gp_posterior(config, csv);
  else if (name == "error-curve") cmd_error_curve(config, csv);
  else if (name == "accept-rate") cmd_accept_rate(config, csv);
  else if (name == "range-curve") cmd_range_curve(config, csv);
  else cmd_spectral_sample(config, csv);

  const std::string out = config.at("out").get<std::string>();
  csv.write(out);
  return out;
}

}  // namespace symkern::cli
