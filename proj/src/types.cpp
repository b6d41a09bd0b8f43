#include "coda/core/types.hpp"

#include <unordered_set>

namespace coda {

FactorSpec::FactorSpec(std::vector<Factor> state_factors,
                       std::vector<Factor> action_factors, std::vector<Interval> bounds)
    : state_factors_(std::move(state_factors)),
      action_factors_(std::move(action_factors)),
      bounds_(std::move(bounds)) {
  if (state_factors_.empty())
    throw std::invalid_argument("FactorSpec: need at least one state factor");
  std::unordered_set<std::string> names;
  auto index = [&](const std::vector<Factor>& fs, std::vector<std::size_t>& offsets,
                   std::size_t& total) {
    offsets.reserve(fs.size());
    for (const Factor& f : fs) {
      if (f.dim == 0)
        throw std::invalid_argument("FactorSpec: factor '" + f.name + "' has dim 0");
      if (!names.insert(f.name).second)
        throw std::invalid_argument("FactorSpec: duplicate factor name '" + f.name + "'");
      offsets.push_back(total);
      total += f.dim;
    }
  };
  index(state_factors_, state_offsets_, state_dims_);
  index(action_factors_, action_offsets_, action_dims_);
  if (bounds_.size() != state_dims_ + action_dims_)
    throw std::invalid_argument("FactorSpec: bounds must cover every dimension");
  for (const Interval& b : bounds_) {
    if (!(b.lo < b.hi)) throw std::invalid_argument("FactorSpec: bound lo must be < hi");
  }
}

const char* to_string(Provenance p) {
  switch (p) {
    case Provenance::kReal: return "real";
    case Provenance::kCoda: return "coda";
    case Provenance::kMocoda: return "mocoda";
    case Provenance::kDyna: return "dyna";
    case Provenance::kRand: return "rand";
  }
  return "real";
}

Provenance provenance_from_string(const std::string& s) {
  if (s == "real") return Provenance::kReal;
  if (s == "coda") return Provenance::kCoda;
  if (s == "mocoda") return Provenance::kMocoda;
  if (s == "dyna") return Provenance::kDyna;
  if (s == "rand") return Provenance::kRand;
  throw std::invalid_argument("unknown provenance tag '" + s + "'");
}

}  // namespace coda
