#include "coda/core/dataset.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "coda/util/rng.hpp"

namespace coda {
namespace {

void check_transition(const FactorSpec& spec, const Transition& t, std::size_t row) {
  const std::string where = "row " + std::to_string(row);
  if (t.s.size() != spec.state_dims() || t.a.size() != spec.action_dims() ||
      t.s_next.size() != spec.state_dims()) {
    throw std::invalid_argument("dimension mismatch at " + where);
  }
  auto finite = [](const Vec& v) {
    for (double x : v)
      if (!std::isfinite(x)) return false;
    return true;
  };
  if (!finite(t.s) || !finite(t.a) || !finite(t.s_next) || !std::isfinite(t.r)) {
    throw std::invalid_argument("non-finite entry at " + where);
  }
}

}  // namespace

Dataset::Dataset(FactorSpec spec, std::vector<Transition> transitions,
                 std::vector<Provenance> provenance)
    : spec_(std::move(spec)) {
  if (transitions.size() != provenance.size())
    throw std::invalid_argument("Dataset: provenance length mismatch");
  transitions_.reserve(transitions.size());
  provenance_.reserve(provenance.size());
  for (std::size_t i = 0; i < transitions.size(); ++i) {
    append(transitions[i], provenance[i]);
  }
}

void Dataset::append(const Transition& t, Provenance p) {
  check_transition(spec_, t, transitions_.size());
  transitions_.push_back(t);
  provenance_.push_back(p);
}

Dataset make_dataset(const FactorSpec& spec, const std::vector<Vec>& rows) {
  const std::size_t n = spec.state_dims();
  const std::size_t m = spec.action_dims();
  const std::size_t width = 2 * n + m + 1;
  Dataset ds(spec);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const Vec& row = rows[i];
    if (row.size() != width) {
      throw std::invalid_argument("dimension mismatch at row " + std::to_string(i) +
                                  ": expected " + std::to_string(width) + " entries, got " +
                                  std::to_string(row.size()));
    }
    Transition t;
    t.s.assign(row.begin(), row.begin() + n);
    t.a.assign(row.begin() + n, row.begin() + n + m);
    t.s_next.assign(row.begin() + n + m, row.begin() + 2 * n + m);
    t.r = row[2 * n + m];
    ds.append(t, Provenance::kReal);
  }
  return ds;
}

std::pair<Dataset, Dataset> split_train_val(const Dataset& ds, std::size_t val_count,
                                            std::uint64_t seed) {
  if (val_count == 0 || val_count >= ds.size())
    throw std::invalid_argument("split_train_val: val_count out of range");
  std::vector<std::size_t> idx(ds.size());
  std::iota(idx.begin(), idx.end(), 0);
  Rng rng(Rng::derive(seed, "split_train_val"));
  // Fisher-Yates with the project RNG so splits are stable across toolchains.
  for (std::size_t i = idx.size() - 1; i > 0; --i) {
    const std::size_t j = rng.uniform_below(i + 1);
    std::swap(idx[i], idx[j]);
  }
  Dataset train(ds.spec());
  Dataset val(ds.spec());
  for (std::size_t k = 0; k < idx.size(); ++k) {
    const std::size_t i = idx[k];
    if (k < val_count) {
      val.append(ds[i], ds.provenance()[i]);
    } else {
      train.append(ds[i], ds.provenance()[i]);
    }
  }
  return {std::move(train), std::move(val)};
}

}  // namespace coda
