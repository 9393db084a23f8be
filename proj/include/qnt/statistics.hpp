// Copyright 2026 The qnt Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace qnt {

inline constexpr int kDefaultTrials = 1000;

namespace detail {

inline void require_samples(double m_samples, double n_samples) {
  if (!(m_samples >= 1.0 && n_samples >= 1.0)) {
    throw std::invalid_argument("sample sizes must be >= 1");
  }
}

inline double checked_div(double num, double den, const char* what) {
  if (den == 0.0 || !std::isfinite(den)) {
    throw std::domain_error(std::string(what) + ": zero denominator");
  }
  return num / den;
}

}  // namespace detail

/**
 * Cramer-Rao reference for the Mergecast estimate of q1 on a star, with M
 * Mergecast and N unicast samples.
 */
inline double crb_mergecast(double M, double N, double q1, double q2,
                            double q3, double s, double m) {
  detail::require_samples(M, N);
  const double ms = m * s;
  const double den = ms * q2 * q3;
  return detail::checked_div(q1 * (1.0 - ms * q1 * q2 * q3), M * den,
                             "crb_mergecast") +
         detail::checked_div(q1 * q1 * (1.0 - ms * q2 * q3), N * den,
                             "crb_mergecast");
}

/// Bound for s with M spam-s samples and N unicast samples.
inline double crb_spam_s(double M, double N, double q1, double q2, double s,
                         double m) {
  detail::require_samples(M, N);
  const double q = q1 * q2;
  const double a = 1.0 - m * s * q;
  const double b = 1.0 - m * s * s * q;
  return detail::checked_div(s * a, N * b * m * q, "crb_spam_s") +
         detail::checked_div(b, M * a * m * q, "crb_spam_s");
}

/// Bound for m with M spam-m samples and N unicast samples.
inline double crb_spam_m(double M, double N, double q1, double q2, double s,
                         double m) {
  detail::require_samples(M, N);
  const double q = q1 * q2;
  const double a = 1.0 - m * s * q;
  const double b = 1.0 - m * m * s * q;
  return detail::checked_div(m * a, N * b * s * q, "crb_spam_m") +
         detail::checked_div(b, M * a * s * q, "crb_spam_m");
}

struct TrialAggregate {
  std::vector<double> estimates;
  double truth = 0.0;
  double mse = 0.0;
  /// Standard deviation of the per-trial squared errors.
  double sq_error_std = 0.0;
  /// sq_error_std / sqrt(n_trials).
  double mse_std = 0.0;
  double mean = 0.0;
  std::size_t n_trials = 0;
};

/**
 * Mean squared error over trials. Sums run over sorted values so the result
 * does not depend on trial order.
 */
inline TrialAggregate aggregate_mse(std::span<const double> estimates,
                                    double truth) {
  if (estimates.empty()) {
    throw std::invalid_argument("aggregate_mse: no estimates");
  }
  TrialAggregate agg;
  agg.estimates.assign(estimates.begin(), estimates.end());
  agg.truth = truth;
  agg.n_trials = estimates.size();
  const double n = static_cast<double>(agg.n_trials);

  std::vector<double> sq(estimates.size());
  std::vector<double> sorted(estimates.begin(), estimates.end());
  for (std::size_t i = 0; i < sq.size(); ++i) {
    const double d = estimates[i] - truth;
    sq[i] = d * d;
  }
  std::sort(sq.begin(), sq.end());
  std::sort(sorted.begin(), sorted.end());

  double sum = 0.0, sum_est = 0.0;
  for (double v : sq) sum += v;
  for (double v : sorted) sum_est += v;
  agg.mse = sum / n;
  agg.mean = sum_est / n;

  double var = 0.0;
  for (double v : sq) var += (v - agg.mse) * (v - agg.mse);
  agg.sq_error_std = agg.n_trials > 1 ? std::sqrt(var / (n - 1.0)) : 0.0;
  agg.mse_std = agg.sq_error_std / std::sqrt(n);
  return agg;
}

inline TrialAggregate aggregate_mse(const std::vector<double>& estimates,
                                    double truth) {
  return aggregate_mse(std::span<const double>(estimates), truth);
}

}  // namespace qnt
