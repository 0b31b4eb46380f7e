#pragma once

#include <map>
#include <string>
#include <vector>

namespace graphid {

/// Identity categories recognised in label files.
const std::vector<std::string>& label_vocabulary();

/// Reads "account,label" CSV; every label must come from the vocabulary.
std::map<std::string, std::string> load_labels(const std::string& path);

/// Case-insensitive substring lookup into the vocabulary ("phish" ->
/// "Phish-hack"). Errors when the query is ambiguous or matches nothing.
std::string resolve_class(const std::string& query);

}  // namespace graphid
