#include "symkern/io.hpp"

#include <fstream>
#include <iomanip>
#include <json.hpp>
#include <sstream>
#include <stdexcept>

namespace symkern {

namespace {

using nlohmann::json;

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

json point_json(const ManifoldPoint& x) {
  json j;
  if (const auto* h = std::get_if<HyperbolicPoint>(&x)) {
    j["space"] = "hyperbolic";
    j["n"] = h->n();
    j["v"] = std::vector<double>(h->v.data(), h->v.data() + h->v.size());
  } else {
    const auto& s = std::get<SpdPoint>(x);
    j["space"] = "spd";
    j["d"] = s.d();
    std::vector<std::vector<double>> rows;
    for (int i = 0; i < s.d(); ++i) {
      rows.emplace_back(s.S.row(i).begin(), s.S.row(i).end());
    }
    j["S"] = rows;
  }
  return j;
}

ManifoldPoint point_from(const json& j) {
  const std::string space = j.at("space").get<std::string>();
  if (space == "hyperbolic") {
    const auto vals = j.at("v").get<std::vector<double>>();
    const int n = j.at("n").get<int>();
    require(static_cast<int>(vals.size()) == n + 1,
            "point json: v must have n + 1 entries");
    HyperbolicPoint p{Eigen::Map<const Eigen::VectorXd>(vals.data(),
                                                        vals.size())};
    validate(p);
    return p;
  }
  require(space == "spd", "point json: unknown space tag");
  const int d = j.at("d").get<int>();
  const auto rows = j.at("S").get<std::vector<std::vector<double>>>();
  require(static_cast<int>(rows.size()) == d, "point json: S row count");
  Eigen::MatrixXd s(d, d);
  for (int i = 0; i < d; ++i) {
    require(static_cast<int>(rows[i].size()) == d, "point json: S column count");
    for (int k = 0; k < d; ++k) s(i, k) = rows[i][k];
  }
  SpdPoint p{s};
  validate(p);
  return p;
}

json spec_json(const KernelSpec& spec) {
  json j;
  if (spec.is_heat()) {
    j["nu"] = "inf";
  } else {
    j["nu"] = spec.nu;
  }
  j["kappa"] = spec.kappa;
  j["sigma2"] = spec.sigma2;
  j["laplacian"] = spec.laplacian == Laplacian::ordinary ? "ordinary" : "shifted";
  return j;
}

KernelSpec spec_from(const json& j) {
  KernelSpec spec;
  const auto& nu = j.at("nu");
  if (nu.is_string()) {
    require(nu.get<std::string>() == "inf", "spec json: nu must be a number or \"inf\"");
    spec.nu = std::numeric_limits<double>::infinity();
  } else {
    spec.nu = nu.get<double>();
  }
  spec.kappa = j.at("kappa").get<double>();
  spec.sigma2 = j.at("sigma2").get<double>();
  const std::string lap = j.value("laplacian", "ordinary");
  require(lap == "ordinary" || lap == "shifted",
          "spec json: laplacian must be ordinary or shifted");
  spec.laplacian = lap == "ordinary" ? Laplacian::ordinary : Laplacian::shifted;
  validate(spec);
  return spec;
}

std::vector<double> flatten(const Eigen::MatrixXd& m) {
  std::vector<double> out;
  out.reserve(m.size());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out.push_back(m(i, j));
  return out;
}

Eigen::MatrixXd unflatten(const std::vector<double>& v, int rows, int cols) {
  require(static_cast<int>(v.size()) == rows * cols, "basis json: matrix size");
  Eigen::MatrixXd m(rows, cols);
  std::size_t k = 0;
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = v[k++];
  return m;
}

}  // namespace

SpaceId parse_space(const std::string& name) {
  auto parse_dim = [&name](std::size_t offset) {
    std::size_t pos = 0;
    const int dim = std::stoi(name.substr(offset), &pos);
    require(offset + pos == name.size(), "parse_space: trailing characters in '" + name + "'");
    return dim;
  };
  if (name.size() > 1 && name[0] == 'h') {
    const int n = parse_dim(1);
    require(n >= 2, "parse_space: hyperbolic dimension must be >= 2");
    return {Space::hyperbolic, n};
  }
  if (name.size() > 3 && name.rfind("spd", 0) == 0) {
    const int d = parse_dim(3);
    require(d >= 2, "parse_space: spd dimension must be >= 2");
    return {Space::spd, d};
  }
  throw std::invalid_argument("parse_space: expected hN or spdD, got '" + name + "'");
}

std::string space_name(SpaceId space) {
  return (space.kind == Space::hyperbolic ? "h" : "spd") +
         std::to_string(space.dim);
}

std::string point_to_json(const ManifoldPoint& x) { return point_json(x).dump(); }

ManifoldPoint point_from_json(const std::string& text) {
  return point_from(json::parse(text));
}

std::string spec_to_json(const KernelSpec& spec) { return spec_json(spec).dump(); }

KernelSpec spec_from_json(const std::string& text) {
  return spec_from(json::parse(text));
}

std::string basis_to_json(const FeatureBasis& basis) {
  json j;
  j["version"] = 1;
  j["space"] = space_name(basis.space);
  j["spec"] = spec_json(basis.spec);
  j["L"] = basis.count;
  j["method"] =
      basis.method == SamplingMethod::rejection ? "rejection" : "importance";
  j["seed"] = basis.seed;
  std::vector<std::vector<double>> lambdas;
  for (const auto& l : basis.lambdas) {
    lambdas.emplace_back(l.data(), l.data() + l.size());
  }
  j["lambdas"] = lambdas;
  std::vector<std::vector<double>> haars;
  for (const auto& h : basis.isotropy) haars.push_back(flatten(h));
  j["haars"] = haars;
  std::vector<std::array<double, 2>> weights;
  for (const auto& w : basis.weights) weights.push_back({w.real(), w.imag()});
  j["weights"] = weights;
  if (!basis.importance_weights.empty()) {
    j["importance_weights"] = basis.importance_weights;
  }
  return j.dump();
}

FeatureBasis basis_from_json(const std::string& text) {
  const json j = json::parse(text);
  require(j.at("version").get<int>() == 1, "basis json: unsupported version");
  FeatureBasis basis;
  basis.space = parse_space(j.at("space").get<std::string>());
  basis.spec = spec_from(j.at("spec"));
  basis.count = j.at("L").get<int>();
  basis.method = j.at("method").get<std::string>() == "rejection"
                     ? SamplingMethod::rejection
                     : SamplingMethod::importance;
  basis.seed = j.value("seed", std::uint64_t{0});
  basis.rho = rho_of(basis.space);

  const auto lambdas = j.at("lambdas").get<std::vector<std::vector<double>>>();
  require(static_cast<int>(lambdas.size()) == basis.count, "basis json: lambdas");
  for (const auto& l : lambdas) {
    basis.lambdas.push_back(
        Eigen::Map<const Eigen::VectorXd>(l.data(), l.size()));
  }
  const int hdim = basis.space.dim;
  const auto haars = j.at("haars").get<std::vector<std::vector<double>>>();
  require(static_cast<int>(haars.size()) == basis.count, "basis json: haars");
  for (const auto& h : haars) basis.isotropy.push_back(unflatten(h, hdim, hdim));
  const auto weights = j.at("weights").get<std::vector<std::array<double, 2>>>();
  require(static_cast<int>(weights.size()) == basis.count, "basis json: weights");
  for (const auto& w : weights) basis.weights.emplace_back(w[0], w[1]);
  if (j.contains("importance_weights")) {
    basis.importance_weights =
        j.at("importance_weights").get<std::vector<double>>();
    require(static_cast<int>(basis.importance_weights.size()) == basis.count,
            "basis json: importance weights");
  }
  return basis;
}

void save_basis(const FeatureBasis& basis, const std::string& path) {
  std::ofstream out(path);
  require(out.good(), "save_basis: cannot open " + path);
  out << basis_to_json(basis) << "\n";
}

FeatureBasis load_basis(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), "load_basis: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return basis_from_json(ss.str());
}

Dataset load_dataset(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), "load_dataset: cannot open " + path);
  Dataset data;
  if (path.size() >= 4 && path.substr(path.size() - 4) == ".csv") {
    // Header row names the coordinate columns (v0.. or s00..), then y, noise.
    std::string line;
    require(static_cast<bool>(std::getline(in, line)), "load_dataset: empty csv");
    const bool hyperbolic = line.find("v0") != std::string::npos;
    std::vector<double> y, noise;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      std::vector<double> row;
      std::stringstream ls(line);
      std::string cell;
      while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
      require(row.size() >= 4, "load_dataset: too few columns");
      const std::size_t ncoord = row.size() - 2;
      if (hyperbolic) {
        HyperbolicPoint p{Eigen::Map<const Eigen::VectorXd>(row.data(),
                                                            ncoord)};
        validate(p);
        data.points.push_back(p);
      } else {
        const int d = static_cast<int>(std::lround(std::sqrt(
            static_cast<double>(ncoord))));
        require(static_cast<std::size_t>(d) * d == ncoord,
                "load_dataset: spd rows need d*d coordinates");
        SpdPoint p{unflatten(std::vector<double>(row.begin(),
                                                 row.begin() + ncoord),
                             d, d)};
        validate(p);
        data.points.push_back(p);
      }
      y.push_back(row[ncoord]);
      noise.push_back(row[ncoord + 1]);
    }
    data.y = Eigen::Map<const Eigen::VectorXd>(y.data(), y.size());
    data.noise = Eigen::Map<const Eigen::VectorXd>(noise.data(), noise.size());
  } else {
    std::stringstream ss;
    ss << in.rdbuf();
    const json j = json::parse(ss.str());
    for (const auto& p : j.at("points")) data.points.push_back(point_from(p));
    const auto y = j.at("y").get<std::vector<double>>();
    const auto noise = j.at("noise").get<std::vector<double>>();
    data.y = Eigen::Map<const Eigen::VectorXd>(y.data(), y.size());
    data.noise = Eigen::Map<const Eigen::VectorXd>(noise.data(), noise.size());
  }
  validate(data);
  return data;
}

void save_dataset(const Dataset& data, const std::string& path) {
  validate(data);
  std::ofstream out(path);
  require(out.good(), "save_dataset: cannot open " + path);
  if (path.size() >= 4 && path.substr(path.size() - 4) == ".csv") {
    require(!data.points.empty(), "save_dataset: csv needs at least one row");
    out << std::setprecision(17);
    const SpaceId space = space_of(data.points.front());
    if (space.kind == Space::hyperbolic) {
      for (int i = 0; i <= space.dim; ++i) out << "v" << i << ",";
    } else {
      for (int i = 0; i < space.dim; ++i)
        for (int k = 0; k < space.dim; ++k) out << "s" << i << k << ",";
    }
    out << "y,noise\n";
    for (std::size_t r = 0; r < data.size(); ++r) {
      if (const auto* h = std::get_if<HyperbolicPoint>(&data.points[r])) {
        for (Eigen::Index i = 0; i < h->v.size(); ++i) out << h->v[i] << ",";
      } else {
        const auto& sp = std::get<SpdPoint>(data.points[r]);
        for (int i = 0; i < sp.d(); ++i)
          for (int k = 0; k < sp.d(); ++k) out << sp.S(i, k) << ",";
      }
      out << data.y[r] << "," << data.noise[r] << "\n";
    }
    return;
  }
  json j;
  json points = json::array();
  for (const auto& p : data.points) points.push_back(point_json(p));
  j["points"] = points;
  j["y"] = std::vector<double>(data.y.data(), data.y.data() + data.y.size());
  j["noise"] =
      std::vector<double>(data.noise.data(), data.noise.data() + data.noise.size());
  out << j.dump(2) << "\n";
}

}  // namespace symkern
