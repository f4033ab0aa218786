#pragma once

#include "dcrl/nn/tensor.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace dcrl::nn {

/// Named parameter arrays plus free-form metadata.
///
/// On disk (line-delimited JSON, UTF-8):
///   line 1:  {"format":"dcrl-checkpoint","version":1,"meta":{...}}
///   line k:  {"name":"<prefix>.<param>","rows":R,"cols":C,"data":[...]}   (column-major, R*C doubles)
/// Arrays appear in the order they were added.
class Checkpoint {
 public:
  static constexpr int kVersion = 1;

  struct Array {
    std::string name;
    Index rows = 0;
    Index cols = 0;
    std::vector<double> data;
  };

  nlohmann::json& meta() { return meta_; }
  const nlohmann::json& meta() const { return meta_; }
  const std::vector<Array>& arrays() const { return arrays_; }

  template <typename Model>
  void add(const std::string& prefix, Model& model) {
    model.for_each_parameter([&](const std::string& name, auto& a) {
      Array arr{prefix + "." + name, a.rows(), a.cols(), {}};
      arr.data.resize(static_cast<std::size_t>(a.size()));
      for (Index k = 0; k < a.size(); ++k) arr.data[static_cast<std::size_t>(k)] = static_cast<double>(a.data()[k]);
      arrays_.push_back(std::move(arr));
    });
  }

  /// Fills every parameter of `model` (which must already have the right shapes).
  template <typename Model>
  void restore(const std::string& prefix, Model& model) const {
    model.for_each_parameter([&](const std::string& name, auto& a) {
      const Array& arr = find(prefix + "." + name);
      require_shape(arr.rows == a.rows() && arr.cols == a.cols(), "checkpoint: shape mismatch for " + arr.name);
      using S = typename std::decay_t<decltype(a)>::Scalar;
      for (Index k = 0; k < a.size(); ++k) a.data()[k] = static_cast<S>(arr.data[static_cast<std::size_t>(k)]);
    });
  }

  const Array& find(const std::string& name) const;
  bool contains(const std::string& name) const;

  void save(const std::filesystem::path& path) const;
  static Checkpoint load(const std::filesystem::path& path);

  std::string serialize() const;
  static Checkpoint parse(const std::string& text);

 private:
  nlohmann::json meta_ = nlohmann::json::object();
  std::vector<Array> arrays_;
};

}  // namespace dcrl::nn
