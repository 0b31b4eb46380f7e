#include "graphid/labels.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>

#include "graphid/common.hpp"

namespace graphid {
namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return char(std::tolower(c)); });
  return s;
}

std::string strip_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

}  // namespace

const std::vector<std::string>& label_vocabulary() {
  static const std::vector<std::string> kLabels = {"Exchange", "ICO-wallets", "Mining",
                                                   "Phish-hack"};
  return kLabels;
}

std::map<std::string, std::string> load_labels(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open label file: " + path);
  std::string line;
  if (!std::getline(in, line) || strip_cr(line) != "account,label")
    throw Error(path + ": expected header \"account,label\"");
  std::map<std::string, std::string> out;
  size_t row = 0;
  const auto& vocab = label_vocabulary();
  while (std::getline(in, line)) {
    row++;
    line = strip_cr(line);
    if (line.empty()) continue;
    auto comma = line.find(',');
    if (comma == std::string::npos)
      throw Error(path + ": row " + std::to_string(row) + ": expected account,label");
    std::string account = line.substr(0, comma);
    std::string label = line.substr(comma + 1);
    if (account.empty()) throw Error(path + ": row " + std::to_string(row) + ": empty account");
    if (std::find(vocab.begin(), vocab.end(), label) == vocab.end())
      throw Error(path + ": row " + std::to_string(row) + ": unknown label \"" + label + "\"");
    if (!out.emplace(account, label).second)
      throw Error(path + ": row " + std::to_string(row) + ": duplicate account " + account);
  }
  return out;
}

std::string resolve_class(const std::string& query) {
  std::string q = lower(query);
  std::string hit;
  for (const auto& name : label_vocabulary()) {
    if (lower(name).find(q) != std::string::npos) {
      if (!hit.empty()) throw Error("class query \"" + query + "\" is ambiguous");
      hit = name;
    }
  }
  if (hit.empty()) throw Error("class query \"" + query + "\" matches no known label");
  return hit;
}

}  // namespace graphid
