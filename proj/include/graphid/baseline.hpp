#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "graphid/record.hpp"
#include "graphid/tensor.hpp"

namespace graphid {

/// Hand-crafted per-account descriptor used by the logistic baseline.
/// Value sums are accumulated exactly in wei and converted to ether once.
/// Plain transfers feed the received/output fields; contract calls feed only
/// the contract-call fields. Ratios with a zero denominator are 0.
struct ManualFeatureVector {
  double active_days = 0;             // distinct UTC days with any activity
  double total_received = 0;          // ether received via transfers
  double num_received_tx = 0;         // transfers in
  double inter_acct_received = 0;     // distinct senders
  double total_output = 0;            // ether sent via transfers
  double num_output_tx = 0;           // transfers out
  double inter_acct_output = 0;       // distinct recipients
  double avg_received = 0;            // total_received / num_received_tx
  double avg_received_day = 0;        // total_received / active_days
  double avg_received_tx_day = 0;     // num_received_tx / active_days
  double avg_output = 0;              // total_output / num_output_tx
  double avg_output_day = 0;          // total_output / active_days
  double avg_output_tx_day = 0;       // num_output_tx / active_days
  double times_contract_called = 0;   // contract calls out
  double times_contract_called_day = 0;  // times_contract_called / active_days
  double num_contract_called = 0;     // distinct contracts called

  std::vector<double> to_vector() const;
  static const std::vector<std::string>& names();
  static constexpr size_t kWidth = 16;
};

ManualFeatureVector compute_manual_features(const std::vector<InteractionRecord>& records,
                                            const std::string& account);

/// One pass over the ledger for many accounts at once; rows align with
/// `accounts`.
Tensor compute_manual_features(const std::vector<InteractionRecord>& records,
                               const std::vector<std::string>& accounts);

/// Column-wise z-scoring with statistics taken from the fitted rows only.
/// Constant columns get std 1 so they standardize to exactly 0.
struct Standardizer {
  std::vector<double> mean;
  std::vector<double> std;

  void fit(const Tensor& x);
  Tensor transform(const Tensor& x) const;
};

/// Binary logistic regression trained by full-batch gradient descent with
/// backtracking line search. L2 penalty applies to weights, not the intercept.
struct LogisticModel {
  std::vector<double> w;
  double b = 0.0;

  double predict_proba(const double* row, size_t n) const;
};

LogisticModel logistic_fit(const Tensor& x, const std::vector<uint8_t>& y, double l2 = 1e-3,
                           int max_iter = 500, double tol = 1e-8);

}  // namespace graphid
