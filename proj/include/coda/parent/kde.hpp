#pragma once

#include "coda/parent/gmm.hpp"

namespace coda {

/// Gaussian-kernel log density log((1/N) sum_i N(q; x_i, h^2 I)) for every
/// query row. Scoring parallelizes over queries.
Vec kde_log_score(const DataMatrix& reference, double bandwidth, const DataMatrix& queries);

double kde_log_score(const DataMatrix& reference, double bandwidth, const Vec& query);

}  // namespace coda
