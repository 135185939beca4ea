#pragma once

#include <Eigen/Core>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "smcmc/dual.hpp"
#include "smcmc/errors.hpp"

namespace smcmc {

/// One named parameter with a uniform box prior. `shared` parameters take a
/// single value across all experimental conditions; the rest get one value
/// per condition.
struct ParamEntry {
  std::string name;
  double lower = 0.0;
  double upper = 0.0;
  bool shared = false;
};

/// Declares the parameter block for a multi-condition experiment and owns the
/// flattening convention: entries in declaration order, each per-condition
/// entry occupying n_conditions consecutive slots (condition-major), each
/// shared entry one slot. Flat dimension is therefore
/// (#shared) + n_conditions * (#per-condition).
class ParamSpec {
 public:
  ParamSpec(std::vector<ParamEntry> entries, int n_conditions)
      : entries_(std::move(entries)), n_conditions_(n_conditions) {
    if (n_conditions_ < 1) throw PreconditionError("ParamSpec: n_conditions must be >= 1");
    if (entries_.empty()) throw PreconditionError("ParamSpec: no parameter entries");
    offsets_.reserve(entries_.size());
    int offset = 0;
    for (const auto& e : entries_) {
      if (e.name.empty()) throw PreconditionError("ParamSpec: empty parameter name");
      if (!(e.lower < e.upper)) {
        throw PreconditionError(
            detail::msg("ParamSpec: entry '", e.name, "' needs lower < upper, got [", e.lower,
                        ", ", e.upper, "]"));
      }
      for (const auto& other : entries_) {
        if (&other != &e && other.name == e.name) {
          throw PreconditionError(detail::msg("ParamSpec: duplicate entry name '", e.name, "'"));
        }
      }
      offsets_.push_back(offset);
      offset += e.shared ? 1 : n_conditions_;
    }
    dim_ = offset;
    slot_lower_.resize(dim_);
    slot_upper_.resize(dim_);
    for (std::size_t k = 0; k < entries_.size(); ++k) {
      const int width = entries_[k].shared ? 1 : n_conditions_;
      for (int c = 0; c < width; ++c) {
        slot_lower_[offsets_[k] + c] = entries_[k].lower;
        slot_upper_[offsets_[k] + c] = entries_[k].upper;
      }
    }
  }

  int dim() const { return dim_; }
  int n_conditions() const { return n_conditions_; }
  const std::vector<ParamEntry>& entries() const { return entries_; }

  int entry_index(std::string_view name) const {
    for (std::size_t k = 0; k < entries_.size(); ++k) {
      if (entries_[k].name == name) return static_cast<int>(k);
    }
    throw PreconditionError(detail::msg("ParamSpec: unknown parameter '", name, "'"));
  }

  /// Flat slot of entry `k` under condition `c`; shared entries ignore `c`
  /// but still validate it.
  int slot(int entry, int condition) const {
    if (entry < 0 || entry >= static_cast<int>(entries_.size())) {
      throw PreconditionError(detail::msg("ParamSpec: entry index ", entry, " out of range"));
    }
    if (condition < 0 || condition >= n_conditions_) {
      throw PreconditionError(
          detail::msg("ParamSpec: condition ", condition, " out of range [0, ", n_conditions_,
                      ")"));
    }
    return entries_[entry].shared ? offsets_[entry] : offsets_[entry] + condition;
  }

  /// Value of named entry under a condition, generic over the scalar type.
  template <typename S>
  S value(std::span<const S> flat, std::string_view name, int condition) const {
    check_dim(flat.size());
    return flat[static_cast<std::size_t>(slot(entry_index(name), condition))];
  }

  double lower_of(int flat_slot) const { return slot_lower_.at(flat_slot); }
  double upper_of(int flat_slot) const { return slot_upper_.at(flat_slot); }

  /// Flat slot names: "name" for shared entries, "name(c1)".."name(cK)" for
  /// per-condition entries (1-based condition labels).
  std::vector<std::string> flat_names() const {
    std::vector<std::string> names(dim_);
    for (std::size_t k = 0; k < entries_.size(); ++k) {
      if (entries_[k].shared) {
        names[offsets_[k]] = entries_[k].name;
      } else {
        for (int c = 0; c < n_conditions_; ++c) {
          names[offsets_[k] + c] = entries_[k].name + "(c" + std::to_string(c + 1) + ")";
        }
      }
    }
    return names;
  }

  /// In-support iff lower_i <= value_i <= upper_i for every slot (bounds
  /// inclusive). Generic: dual inputs are judged by their primal part.
  template <typename S>
  bool in_support(std::span<const S> flat) const {
    check_dim(flat.size());
    for (int i = 0; i < dim_; ++i) {
      const double x = primal(flat[i]);
      if (!(x >= slot_lower_[i] && x <= slot_upper_[i])) return false;
    }
    return true;
  }

  bool in_support(Eigen::Ref<const Eigen::VectorXd> flat) const {
    return in_support(std::span<const double>(flat.data(), flat.size()));
  }

 private:
  void check_dim(std::size_t got) const {
    if (static_cast<int>(got) != dim_) {
      throw PreconditionError(
          detail::msg("ParamSpec: flat vector has ", got, " slots, expected ", dim_));
    }
  }

  std::vector<ParamEntry> entries_;
  int n_conditions_;
  std::vector<int> offsets_;
  int dim_ = 0;
  std::vector<double> slot_lower_, slot_upper_;
};

/// A flat parameter vector tied to its spec.
struct ParamVector {
  const ParamSpec* spec = nullptr;
  Eigen::VectorXd values;

  bool in_support() const { return spec != nullptr && spec->in_support(values); }
};

}  // namespace smcmc
