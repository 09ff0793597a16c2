#pragma once

#include "json.hpp"  // vendored single-header nlohmann json

#include "wavefront/model.hpp"

namespace wavefront {

/// Parses a kernel description: {"atoms": [[theta, [[w]]], ...],
/// "density": {"pieces": [{"a":, "b":, "coeffs": [[[..]], ...],
/// "quad_nodes":}]}}. Unknown keys are rejected.
DelayKernel parse_kernel(const nlohmann::json& j, int n, double tau);

/// Parses a model description with fields name, N, tau, kernel, builtin.
/// With a "builtin" selector the named built-in model is constructed from
/// its parameter record ("logistic_distributed" additionally takes its
/// interaction kernel from the "kernel" field). Without one, the file
/// defines the linear model f(phi) = L phi, which supports spectral
/// analysis but has no positive equilibrium.
Model parse_model(const nlohmann::json& j);

/// Reads and parses a model or run-configuration file.
nlohmann::json load_json(const std::string& path);

/// Throws ConfigError when j holds keys outside `allowed`.
void reject_unknown_keys(const nlohmann::json& j, const std::vector<std::string>& allowed,
                         const std::string& where);

}  // namespace wavefront
