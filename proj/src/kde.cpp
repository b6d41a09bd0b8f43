#include "coda/parent/kde.hpp"

#include <cmath>
#include <stdexcept>

#include "coda/simd/kernels.hpp"
#include "coda/util/parallel.hpp"

namespace coda {

Vec kde_log_score(const DataMatrix& reference, double bandwidth, const DataMatrix& queries) {
  if (reference.rows == 0) throw std::invalid_argument("kde_log_score: empty reference");
  if (!(bandwidth > 0.0)) throw std::invalid_argument("kde_log_score: bandwidth must be > 0");
  if (queries.cols != reference.cols)
    throw std::invalid_argument("kde_log_score: query dimension mismatch");
  const std::size_t n = reference.rows;
  const std::size_t d = reference.cols;
  const double inv2h2 = 1.0 / (2.0 * bandwidth * bandwidth);
  const double log_norm = -std::log(static_cast<double>(n)) -
                          static_cast<double>(d) *
                              (std::log(bandwidth) + 0.5 * std::log(2.0 * M_PI));

  // Column-major copy of the reference so the per-query distance pass runs
  // over contiguous memory.
  std::vector<double> cols(n * d);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) cols[j * n + i] = reference.row(i)[j];
  }

  Vec out(queries.rows, 0.0);
  const auto& kn = simd::active();
  const std::size_t workers = std::max<std::size_t>(1, worker_count());
  const std::size_t chunk = (queries.rows + workers - 1) / workers;
  parallel_for(workers, [&](std::size_t w) {
    std::vector<double> scores(n);
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(queries.rows, begin + chunk);
    for (std::size_t q = begin; q < end; ++q) {
      const double* query = queries.row(q);
      for (std::size_t i = 0; i < n; ++i) scores[i] = 0.0;
      for (std::size_t j = 0; j < d; ++j) {
        const double qj = query[j];
        const double* cj = cols.data() + j * n;
        for (std::size_t i = 0; i < n; ++i) {
          const double diff = cj[i] - qj;
          scores[i] += diff * diff;
        }
      }
      for (std::size_t i = 0; i < n; ++i) scores[i] *= -inv2h2;
      const double m = kn.max(scores.data(), n);
      out[q] = m + std::log(kn.exp_sum_shifted(scores.data(), m, n)) + log_norm;
    }
  });
  return out;
}

double kde_log_score(const DataMatrix& reference, double bandwidth, const Vec& query) {
  DataMatrix q(1, query.size());
  for (std::size_t i = 0; i < query.size(); ++i) q.values[i] = query[i];
  return kde_log_score(reference, bandwidth, q)[0];
}

}  // namespace coda
