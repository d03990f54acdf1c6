#include "qssm/param_store.hpp"

#include <stdexcept>

namespace qssm {

void ParameterStore::register_param(std::string name, std::span<double> value,
                                    bool trainable, bool decay) {
  if (value.empty()) {
    throw std::invalid_argument("register_param: empty value for " + name);
  }
  if (has(name)) {
    throw std::logic_error("register_param: duplicate name " + name);
  }
  ParamEntry e;
  e.name = std::move(name);
  e.data = value.data();
  e.size = value.size();
  e.grad.assign(value.size(), 0.0);
  e.m.assign(value.size(), 0.0);
  e.v.assign(value.size(), 0.0);
  e.trainable = trainable;
  e.decay = decay;
  entries_.push_back(std::move(e));
}

bool ParameterStore::has(std::string_view name) const {
  for (const auto& e : entries_) {
    if (e.name == name) return true;
  }
  return false;
}

ParamEntry& ParameterStore::find(std::string_view name) {
  for (auto& e : entries_) {
    if (e.name == name) return e;
  }
  throw std::invalid_argument("parameter store: unknown name " +
                              std::string(name));
}

const ParamEntry& ParameterStore::find(std::string_view name) const {
  for (const auto& e : entries_) {
    if (e.name == name) return e;
  }
  throw std::invalid_argument("parameter store: unknown name " +
                              std::string(name));
}

void ParameterStore::zero_grads() {
  for (auto& e : entries_) {
    std::fill(e.grad.begin(), e.grad.end(), 0.0);
  }
}

void ParameterStore::reset_moments() {
  for (auto& e : entries_) {
    std::fill(e.m.begin(), e.m.end(), 0.0);
    std::fill(e.v.begin(), e.v.end(), 0.0);
  }
}

std::size_t ParameterStore::total_size() const {
  std::size_t n = 0;
  for (const auto& e : entries_) n += e.size;
  return n;
}

Vector ParameterStore::snapshot() const {
  Vector snap;
  snap.reserve(total_size());
  for (const auto& e : entries_) {
    snap.insert(snap.end(), e.data, e.data + e.size);
  }
  return snap;
}

void ParameterStore::restore(std::span<const double> snap) {
  if (snap.size() != total_size()) {
    throw std::invalid_argument("restore: snapshot size mismatch");
  }
  std::size_t off = 0;
  for (auto& e : entries_) {
    for (std::size_t i = 0; i < e.size; ++i) e.data[i] = snap[off + i];
    off += e.size;
  }
  mark_mutated();
}

}  // namespace qssm
