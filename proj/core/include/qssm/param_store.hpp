#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qssm/tensor.hpp"

namespace qssm {

// One registered parameter. The value is a view into the owning model
// struct; gradient and Adam moments live here and match its size.
struct ParamEntry {
  std::string name;
  double* data = nullptr;
  std::size_t size = 0;
  Vector grad;
  Vector m;
  Vector v;
  bool trainable = true;
  bool decay = false;

  std::span<double> value() { return {data, size}; }
  std::span<const double> value() const { return {data, size}; }
};

class ParameterStore {
 public:
  ParameterStore() = default;
  ParameterStore(const ParameterStore&) = delete;
  ParameterStore& operator=(const ParameterStore&) = delete;
  ParameterStore(ParameterStore&&) = default;
  ParameterStore& operator=(ParameterStore&&) = default;

  void register_param(std::string name, std::span<double> value,
                      bool trainable, bool decay);

  std::size_t size() const { return entries_.size(); }
  ParamEntry& entry(std::size_t i) { return entries_[i]; }
  const ParamEntry& entry(std::size_t i) const { return entries_[i]; }

  bool has(std::string_view name) const;
  ParamEntry& find(std::string_view name);
  const ParamEntry& find(std::string_view name) const;
  std::span<double> value(std::string_view name) { return find(name).value(); }
  std::span<double> grad(std::string_view name) { return {find(name).grad}; }

  void zero_grads();
  void reset_moments();

  // Bumped on every value mutation; forward caches stamp it so a
  // backward pass against stale values is detectable.
  std::uint64_t revision() const { return revision_; }
  void mark_mutated() { ++revision_; }

  std::size_t total_size() const;
  Vector snapshot() const;
  void restore(std::span<const double> snap);

 private:
  std::vector<ParamEntry> entries_;
  std::uint64_t revision_ = 1;
};

}  // namespace qssm
