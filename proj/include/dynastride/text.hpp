#ifndef DYNASTRIDE_TEXT_HPP
#define DYNASTRIDE_TEXT_HPP

#include <string>
#include <vector>

namespace dynastride {

// Shared tokenization rule for every n-gram metric and for the mock
// embedder: lowercase, split on whitespace, strip leading/trailing ASCII
// punctuation per token, drop empties.
std::vector<std::string> tokenize(const std::string& text);

// Split a caption into sentences on '.', '!', '?' boundaries; trims each
// sentence and drops empties. The terminator stays attached.
std::vector<std::string> split_sentences(const std::string& text);

std::string trim(const std::string& s);
std::string to_lower(std::string s);

// Collapse any run of whitespace (incl. newlines) to a single space.
std::string collapse_whitespace(const std::string& s);

std::string join(const std::vector<std::string>& parts, const std::string& sep);

}  // namespace dynastride

#endif  // DYNASTRIDE_TEXT_HPP
