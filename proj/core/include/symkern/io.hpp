#pragma once

#include <string>

#include "symkern/features.hpp"
#include "symkern/gp.hpp"
#include "symkern/manifolds.hpp"
#include "symkern/spectral.hpp"

namespace symkern {

/// "h2", "h3", ..., "spd2", "spd3", ...
SpaceId parse_space(const std::string& name);
std::string space_name(SpaceId space);

/// {"space":"hyperbolic","n":3,"v":[...]} or
/// {"space":"spd","d":2,"S":[[...],[...]]}
std::string point_to_json(const ManifoldPoint& x);
ManifoldPoint point_from_json(const std::string& text);

/// {"nu": 1.5 | "inf", "kappa": .., "sigma2": .., "laplacian": "ordinary"}
std::string spec_to_json(const KernelSpec& spec);
KernelSpec spec_from_json(const std::string& text);

/// Versioned basis document with lambdas, flattened isotropy matrices,
/// weights as [re, im] pairs and the seed provenance.
std::string basis_to_json(const FeatureBasis& basis);
FeatureBasis basis_from_json(const std::string& text);

void save_basis(const FeatureBasis& basis, const std::string& path);
FeatureBasis load_basis(const std::string& path);

/// Dataset files: .json ({"points": [...], "y": [...], "noise": [...]}) or
/// .csv (point coordinate columns per the point schema, then y, noise).
Dataset load_dataset(const std::string& path);
void save_dataset(const Dataset& data, const std::string& path);

}  // namespace symkern
