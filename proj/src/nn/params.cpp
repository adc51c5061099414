#include "evfl/nn/params.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace evfl::nn {

Index ModelParameters::total_scalar_count() const {
  Index n = 0;
  for (const ParamArray& b : blocks) {
    n += b.value.size();
  }
  return n;
}

bool ModelParameters::same_shape(const ModelParameters& other) const {
  if (blocks.size() != other.blocks.size()) {
    return false;
  }
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    if (blocks[i].value.rows() != other.blocks[i].value.rows() ||
        blocks[i].value.cols() != other.blocks[i].value.cols()) {
      return false;
    }
  }
  return true;
}

Vector ModelParameters::flatten() const {
  Vector flat(total_scalar_count());
  Index k = 0;
  for (const ParamArray& b : blocks) {
    for (Index i = 0; i < b.value.rows(); ++i) {
      for (Index j = 0; j < b.value.cols(); ++j) {
        flat[k++] = b.value(i, j);
      }
    }
  }
  return flat;
}

void ModelParameters::unflatten(const Vector& flat) {
  if (flat.size() != total_scalar_count()) {
    throw std::invalid_argument("unflatten: vector length " +
                                std::to_string(flat.size()) +
                                " does not match parameter count " +
                                std::to_string(total_scalar_count()));
  }
  Index k = 0;
  for (ParamArray& b : blocks) {
    for (Index i = 0; i < b.value.rows(); ++i) {
      for (Index j = 0; j < b.value.cols(); ++j) {
        b.value(i, j) = flat[k++];
      }
    }
  }
}

void ModelParameters::set_zero() {
  for (ParamArray& b : blocks) {
    b.value.setZero();
  }
}

void ModelParameters::add_scaled(const ModelParameters& other, double factor) {
  if (!same_shape(other)) {
    throw std::invalid_argument("add_scaled: parameter shapes do not match");
  }
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    blocks[i].value += factor * other.blocks[i].value;
  }
}

void ModelParameters::scale(double factor) {
  for (ParamArray& b : blocks) {
    b.value *= factor;
  }
}

std::string serialize_parameters(const ModelParameters& params) {
  nlohmann::json root;
  root["format"] = "evfl-params-v1";
  nlohmann::json blocks = nlohmann::json::array();
  for (const ParamArray& b : params.blocks) {
    nlohmann::json block;
    block["name"] = b.name;
    block["rows"] = b.value.rows();
    block["cols"] = b.value.cols();
    std::vector<double> values;
    values.reserve(static_cast<std::size_t>(b.value.size()));
    for (Index i = 0; i < b.value.rows(); ++i) {
      for (Index j = 0; j < b.value.cols(); ++j) {
        values.push_back(b.value(i, j));
      }
    }
    block["values"] = std::move(values);
    blocks.push_back(std::move(block));
  }
  root["blocks"] = std::move(blocks);
  return root.dump();
}

ModelParameters deserialize_parameters(const std::string& text) {
  const nlohmann::json root = nlohmann::json::parse(text);
  if (root.value("format", "") != "evfl-params-v1") {
    throw std::runtime_error("deserialize_parameters: unknown format tag");
  }
  ModelParameters params;
  for (const nlohmann::json& block : root.at("blocks")) {
    ParamArray array;
    array.name = block.at("name").get<std::string>();
    const Index rows = block.at("rows").get<Index>();
    const Index cols = block.at("cols").get<Index>();
    const auto& values = block.at("values");
    if (static_cast<Index>(values.size()) != rows * cols) {
      throw std::runtime_error("deserialize_parameters: block '" + array.name +
                               "' value count does not match shape");
    }
    array.value.resize(rows, cols);
    Index k = 0;
    for (Index i = 0; i < rows; ++i) {
      for (Index j = 0; j < cols; ++j) {
        array.value(i, j) = values[k++].get<double>();
      }
    }
    params.blocks.push_back(std::move(array));
  }
  return params;
}

void save_parameters(const ModelParameters& params, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("save_parameters: cannot open '" + path + "'");
  }
  out << serialize_parameters(params);
  if (!out) {
    throw std::runtime_error("save_parameters: write to '" + path + "' failed");
  }
}

ModelParameters load_parameters(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("load_parameters: cannot open '" + path + "'");
  }
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return deserialize_parameters(text);
}

}  // namespace evfl::nn
