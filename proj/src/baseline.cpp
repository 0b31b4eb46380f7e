#include "graphid/baseline.hpp"

#include <cmath>
#include <unordered_map>
#include <unordered_set>

#include "graphid/common.hpp"

namespace graphid {
namespace {

int64_t utc_day(int64_t ts) {
  return ts >= 0 ? ts / 86400 : (ts - 86399) / 86400;
}

double ratio(double num, double den) { return den == 0.0 ? 0.0 : num / den; }

struct Accum {
  std::unordered_set<int64_t> days;
  std::unordered_set<std::string> senders;
  std::unordered_set<std::string> recipients;
  std::unordered_set<std::string> contracts;
  Amount received;
  Amount output;
  uint64_t n_received = 0;
  uint64_t n_output = 0;
  uint64_t n_calls = 0;

  ManualFeatureVector finish() const {
    ManualFeatureVector f;
    f.active_days = double(days.size());
    f.total_received = received.to_ether();
    f.num_received_tx = double(n_received);
    f.inter_acct_received = double(senders.size());
    f.total_output = output.to_ether();
    f.num_output_tx = double(n_output);
    f.inter_acct_output = double(recipients.size());
    f.avg_received = ratio(f.total_received, f.num_received_tx);
    f.avg_received_day = ratio(f.total_received, f.active_days);
    f.avg_received_tx_day = ratio(f.num_received_tx, f.active_days);
    f.avg_output = ratio(f.total_output, f.num_output_tx);
    f.avg_output_day = ratio(f.total_output, f.active_days);
    f.avg_output_tx_day = ratio(f.num_output_tx, f.active_days);
    f.times_contract_called = double(n_calls);
    f.times_contract_called_day = ratio(f.times_contract_called, f.active_days);
    f.num_contract_called = double(contracts.size());
    return f;
  }
};

void feed(Accum& a, const InteractionRecord& r, bool as_from) {
  a.days.insert(utc_day(r.timestamp));
  if (r.is_contract_call()) {
    if (as_from) {
      a.n_calls++;
      a.contracts.insert(r.to_account);
    }
    return;
  }
  if (as_from) {
    a.output = a.output.checked_add(r.value);
    a.n_output++;
    a.recipients.insert(r.to_account);
  } else {
    a.received = a.received.checked_add(r.value);
    a.n_received++;
    a.senders.insert(r.from_account);
  }
}

}  // namespace

std::vector<double> ManualFeatureVector::to_vector() const {
  return {active_days,
          total_received,
          num_received_tx,
          inter_acct_received,
          total_output,
          num_output_tx,
          inter_acct_output,
          avg_received,
          avg_received_day,
          avg_received_tx_day,
          avg_output,
          avg_output_day,
          avg_output_tx_day,
          times_contract_called,
          times_contract_called_day,
          num_contract_called};
}

const std::vector<std::string>& ManualFeatureVector::names() {
  static const std::vector<std::string> kNames = {"active_days",
                                                  "total_received",
                                                  "num_received_tx",
                                                  "inter_acct_received",
                                                  "total_output",
                                                  "num_output_tx",
                                                  "inter_acct_output",
                                                  "avg_received",
                                                  "avg_received_day",
                                                  "avg_received_tx_day",
                                                  "avg_output",
                                                  "avg_output_day",
                                                  "avg_output_tx_day",
                                                  "times_contract_called",
                                                  "times_contract_called_day",
                                                  "num_contract_called"};
  return kNames;
}

ManualFeatureVector compute_manual_features(const std::vector<InteractionRecord>& records,
                                            const std::string& account) {
  Accum a;
  for (const auto& r : records) {
    if (r.from_account == account) feed(a, r, true);
    if (r.to_account == account) feed(a, r, false);
  }
  return a.finish();
}

Tensor compute_manual_features(const std::vector<InteractionRecord>& records,
                               const std::vector<std::string>& accounts) {
  std::unordered_map<std::string, size_t> index;
  index.reserve(accounts.size());
  for (size_t i = 0; i < accounts.size(); ++i) index.emplace(accounts[i], i);
  std::vector<Accum> acc(accounts.size());
  for (const auto& r : records) {
    auto it = index.find(r.from_account);
    if (it != index.end()) feed(acc[it->second], r, true);
    it = index.find(r.to_account);
    if (it != index.end()) feed(acc[it->second], r, false);
  }
  Tensor x = Tensor::zeros(accounts.size(), ManualFeatureVector::kWidth);
  for (size_t i = 0; i < accounts.size(); ++i) {
    auto v = acc[i].finish().to_vector();
    std::copy(v.begin(), v.end(), x.row(i));
  }
  return x;
}

void Standardizer::fit(const Tensor& x) {
  if (x.rows == 0) throw Error("standardizer: no rows");
  mean.assign(x.cols, 0.0);
  std.assign(x.cols, 0.0);
  for (size_t i = 0; i < x.rows; ++i)
    for (size_t j = 0; j < x.cols; ++j) mean[j] += x.at(i, j);
  for (size_t j = 0; j < x.cols; ++j) mean[j] /= double(x.rows);
  for (size_t i = 0; i < x.rows; ++i)
    for (size_t j = 0; j < x.cols; ++j) {
      double d = x.at(i, j) - mean[j];
      std[j] += d * d;
    }
  for (size_t j = 0; j < x.cols; ++j) {
    std[j] = std::sqrt(std[j] / double(x.rows));
    if (std[j] == 0.0) std[j] = 1.0;
  }
}

Tensor Standardizer::transform(const Tensor& x) const {
  if (x.cols != mean.size()) throw Error("standardizer: width mismatch");
  Tensor out = x;
  for (size_t i = 0; i < out.rows; ++i)
    for (size_t j = 0; j < out.cols; ++j) out.at(i, j) = (out.at(i, j) - mean[j]) / std[j];
  return out;
}

namespace {

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  double e = std::exp(z);
  return e / (1.0 + e);
}

double softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::fabs(z))); }

double objective(const Tensor& x, const std::vector<uint8_t>& y, const std::vector<double>& w,
                 double b, double l2) {
  double loss = 0.0;
  for (size_t i = 0; i < x.rows; ++i) {
    double z = b;
    const double* row = x.row(i);
    for (size_t j = 0; j < x.cols; ++j) z += row[j] * w[j];
    loss += softplus(z) - (y[i] ? z : 0.0);
  }
  loss /= double(x.rows);
  for (double wj : w) loss += 0.5 * l2 * wj * wj;
  return loss;
}

}  // namespace

double LogisticModel::predict_proba(const double* row, size_t n) const {
  if (n != w.size()) throw Error("logistic: width mismatch");
  double z = b;
  for (size_t j = 0; j < n; ++j) z += row[j] * w[j];
  return sigmoid(z);
}

LogisticModel logistic_fit(const Tensor& x, const std::vector<uint8_t>& y, double l2,
                           int max_iter, double tol) {
  if (x.rows != y.size()) throw Error("logistic_fit: row/label count mismatch");
  if (x.rows == 0) throw Error("logistic_fit: empty input");
  bool has0 = false, has1 = false;
  for (uint8_t v : y) (v ? has1 : has0) = true;
  if (!has0 || !has1) throw Error("logistic_fit: labels contain a single class");

  std::vector<double> w(x.cols, 0.0);
  double b = 0.0;
  double f = objective(x, y, w, b, l2);
  std::vector<double> gw(x.cols);
  for (int it = 0; it < max_iter; ++it) {
    std::fill(gw.begin(), gw.end(), 0.0);
    double gb = 0.0;
    for (size_t i = 0; i < x.rows; ++i) {
      double z = b;
      const double* row = x.row(i);
      for (size_t j = 0; j < x.cols; ++j) z += row[j] * w[j];
      double d = sigmoid(z) - double(y[i]);
      gb += d;
      for (size_t j = 0; j < x.cols; ++j) gw[j] += d * row[j];
    }
    double inv = 1.0 / double(x.rows);
    gb *= inv;
    double gnorm2 = gb * gb, ginf = std::fabs(gb);
    for (size_t j = 0; j < x.cols; ++j) {
      gw[j] = gw[j] * inv + l2 * w[j];
      gnorm2 += gw[j] * gw[j];
      ginf = std::max(ginf, std::fabs(gw[j]));
    }
    if (ginf < tol) break;

    double step = 1.0;
    std::vector<double> wn(x.cols);
    double bn, fn;
    for (;;) {
      for (size_t j = 0; j < x.cols; ++j) wn[j] = w[j] - step * gw[j];
      bn = b - step * gb;
      fn = objective(x, y, wn, bn, l2);
      if (fn <= f - 1e-4 * step * gnorm2 || step < 1e-12) break;
      step *= 0.5;
    }
    w.swap(wn);
    b = bn;
    f = fn;
  }
  LogisticModel m;
  m.w = std::move(w);
  m.b = b;
  return m;
}

}  // namespace graphid
