#pragma once

#include <string>
#include <vector>

#include "evfl/types.hpp"

namespace evfl::nn {

struct ParamArray {
  std::string name;
  Matrix value;
};

/// Flat, ordered collection of every trainable array of one network.
/// Two collections with identical block shapes are element-wise combinable,
/// which is what federated averaging and Adam rely on.
struct ModelParameters {
  std::vector<ParamArray> blocks;

  Index total_scalar_count() const;
  bool same_shape(const ModelParameters& other) const;

  /// Row-major within each block, blocks in order.
  Vector flatten() const;
  /// Inverse of flatten; shapes must already match this collection.
  void unflatten(const Vector& flat);

  void set_zero();
  /// this += factor * other (shapes must match).
  void add_scaled(const ModelParameters& other, double factor);
  void scale(double factor);
};

/// Ordered, named, shape-tagged JSON container; round-trips bit-exactly.
std::string serialize_parameters(const ModelParameters& params);
ModelParameters deserialize_parameters(const std::string& text);

void save_parameters(const ModelParameters& params, const std::string& path);
ModelParameters load_parameters(const std::string& path);

}  // namespace evfl::nn
